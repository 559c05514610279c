//! Galerkin and SUPG pencils `A u = lambda B u` for the radial Dirac operator
//!
//! ```text
//! H = [ mc^2 + V          c(-d/dr + k/r) ]
//!     [ c(d/dr + k/r)     -mc^2 + V      ]
//! ```
//!
//! Unknowns are ordered block-wise: the `n` nodal values of the large
//! component `f` followed by the `n` values of the small component `g`.
//! The stabilised form tests with `phi_i + tau_i phi_i'`, which multiplies
//! every derivative-tested integral by `diag(tau)` from the left.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::{assemble_integral, IntegralSpec, TriDiag, Weight};
use crate::mesh::Mesh;
use crate::physics::{PhysicalParams, PotentialModel};

/// Discretisation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Galerkin,
    Supg,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Galerkin => "galerkin",
            Method::Supg => "supg",
        }
    }
}

/// `2n x 2n` matrix made of four tridiagonal `n x n` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub ff: TriDiag,
    pub fg: TriDiag,
    pub gf: TriDiag,
    pub gg: TriDiag,
}

impl BlockMatrix {
    pub fn new(ff: TriDiag, fg: TriDiag, gf: TriDiag, gg: TriDiag) -> Result<Self> {
        let n = ff.dim();
        if fg.dim() != n || gf.dim() != n || gg.dim() != n {
            return Err(Error::Config("blocks must share one dimension".into()));
        }
        Ok(BlockMatrix { ff, fg, gf, gg })
    }

    /// Block size `n`.
    pub fn block_dim(&self) -> usize {
        self.ff.dim()
    }

    /// Full size `2n`.
    pub fn dim(&self) -> usize {
        2 * self.block_dim()
    }

    fn block(&self, i: usize, j: usize) -> (&TriDiag, usize, usize) {
        let n = self.block_dim();
        match (i < n, j < n) {
            (true, true) => (&self.ff, i, j),
            (true, false) => (&self.fg, i, j - n),
            (false, true) => (&self.gf, i - n, j),
            (false, false) => (&self.gg, i - n, j - n),
        }
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.dim() || j >= self.dim() {
            return 0.0;
        }
        let (b, bi, bj) = self.block(i, j);
        b.get(bi, bj)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let m = self.dim();
        let n = self.block_dim();
        let mut d = vec![0.0; m * m];
        for (bi, bj, b) in [
            (0, 0, &self.ff),
            (0, n, &self.fg),
            (n, 0, &self.gf),
            (n, n, &self.gg),
        ] {
            for i in 0..n {
                for j in i.saturating_sub(1)..(i + 2).min(n) {
                    d[(bi + i) * m + bj + j] = b.get(i, j);
                }
            }
        }
        d
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.block_dim();
        assert_eq!(x.len(), 2 * n);
        let (xf, xg) = x.split_at(n);
        let mut y = Vec::with_capacity(2 * n);
        let (a, b) = (self.ff.matvec(xf), self.fg.matvec(xg));
        y.extend(a.iter().zip(&b).map(|(p, q)| p + q));
        let (a, b) = (self.gf.matvec(xf), self.gg.matvec(xg));
        y.extend(a.iter().zip(&b).map(|(p, q)| p + q));
        y
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.block_dim();
        let row = |a: &TriDiag, b: &TriDiag, i: usize| {
            let s = |t: &TriDiag| {
                libm::fabs(t.sub()[i]) + libm::fabs(t.diag()[i]) + libm::fabs(t.sup()[i])
            };
            s(a) + s(b)
        };
        (0..n)
            .map(|i| row(&self.ff, &self.fg, i).max(row(&self.gf, &self.gg, i)))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        [&self.ff, &self.fg, &self.gf, &self.gg]
            .iter()
            .map(|b| b.max_abs())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        BlockMatrix {
            ff: self.ff.transpose(),
            fg: self.gf.transpose(),
            gf: self.fg.transpose(),
            gg: self.gg.transpose(),
        }
    }

    /// `max |M - M^T| <= tol * max |M|`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let t = self.transpose();
        let scale = self.max_abs();
        let pairs = [
            (&self.ff, &t.ff),
            (&self.fg, &t.fg),
            (&self.gf, &t.gf),
            (&self.gg, &t.gg),
        ];
        pairs
            .iter()
            .all(|(a, b)| a.add_scaled(-1.0, b).max_abs() <= tol * scale)
    }
}

/// Generalised eigenproblem `left u = lambda right u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub method: Method,
    pub params: PhysicalParams,
    pub left: BlockMatrix,
    pub right: BlockMatrix,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.left.dim()
    }
}

/// Every element-integral family used by the two schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralFamilies {
    pub a000: TriDiag,
    pub a100: TriDiag,
    pub a010: TriDiag,
    pub a110: TriDiag,
    pub a001: TriDiag,
    pub a101: TriDiag,
    /// Potential against `phi_j phi_i`.
    pub v000: TriDiag,
    /// Potential against `phi_j phi_i'`.
    pub v100: TriDiag,
}

impl IntegralFamilies {
    pub fn assemble(mesh: &Mesh, model: &PotentialModel, charge: f64) -> Result<Self> {
        let unit = |spec| assemble_integral(mesh, spec, Weight::Unit);
        let pot = |spec| assemble_integral(mesh, spec, Weight::Potential { model, charge });
        Ok(IntegralFamilies {
            a000: unit(IntegralSpec::MASS)?,
            a100: unit(IntegralSpec::TEST_DERIVATIVE)?,
            a010: unit(IntegralSpec::TRIAL_DERIVATIVE)?,
            a110: unit(IntegralSpec::STIFFNESS)?,
            a001: unit(IntegralSpec::INVERSE_RADIUS)?,
            a101: unit(IntegralSpec::TEST_DERIVATIVE_INVERSE_RADIUS)?,
            v000: pot(IntegralSpec::MASS)?,
            v100: pot(IntegralSpec::TEST_DERIVATIVE)?,
        })
    }
}

/// Assemble the pencil of `method` on `mesh`.
pub fn assemble(
    method: Method,
    params: &PhysicalParams,
    mesh: &Mesh,
    model: &PotentialModel,
) -> Result<Pencil> {
    match method {
        Method::Galerkin => assemble_galerkin(params, mesh, model),
        Method::Supg => assemble_supg(params, mesh, model),
    }
}

pub fn assemble_galerkin(
    params: &PhysicalParams,
    mesh: &Mesh,
    model: &PotentialModel,
) -> Result<Pencil> {
    let fam = IntegralFamilies::assemble(mesh, model, f64::from(params.charge()))?;
    let mc2 = params.rest_energy();
    let c = params.light_speed();
    let ck = c * f64::from(params.kappa());
    let left = BlockMatrix {
        ff: fam.v000.add_scaled(mc2, &fam.a000),
        fg: fam.a001.scaled(ck).add_scaled(-c, &fam.a010),
        gf: fam.a001.scaled(ck).add_scaled(c, &fam.a010),
        gg: fam.v000.add_scaled(-mc2, &fam.a000),
    };
    let n = fam.a000.dim();
    let right = BlockMatrix {
        ff: fam.a000.clone(),
        fg: TriDiag::zeros(n),
        gf: TriDiag::zeros(n),
        gg: fam.a000,
    };
    Ok(Pencil {
        method: Method::Galerkin,
        params: *params,
        left,
        right,
    })
}

/// Stabilised pencil with `tau_j = (h_{j+1} - h_j) / 3` from the mesh.
pub fn assemble_supg(
    params: &PhysicalParams,
    mesh: &Mesh,
    model: &PotentialModel,
) -> Result<Pencil> {
    assemble_supg_with_taus(params, mesh, model, mesh.taus())
}

/// Stabilised pencil with caller-supplied stability parameters.
pub fn assemble_supg_with_taus(
    params: &PhysicalParams,
    mesh: &Mesh,
    model: &PotentialModel,
    taus: &[f64],
) -> Result<Pencil> {
    let n = mesh.interior_count();
    if taus.len() != n {
        return Err(Error::Config(alloc::format!(
            "{} stability parameters for {} interior nodes",
            taus.len(),
            n
        )));
    }
    let fam = IntegralFamilies::assemble(mesh, model, f64::from(params.charge()))?;
    let mc2 = params.rest_energy();
    let c = params.light_speed();
    let ck = c * f64::from(params.kappa());
    let t110 = fam.a110.rows_scaled(taus);
    let t101 = fam.a101.rows_scaled(taus);
    let t100 = fam.a100.rows_scaled(taus);
    let tv100 = fam.v100.rows_scaled(taus);

    let ff = fam
        .v000
        .add_scaled(mc2, &fam.a000)
        .add_scaled(c, &t110)
        .add_scaled(ck, &t101);
    let fg = tv100
        .add_scaled(-c, &fam.a010)
        .add_scaled(ck, &fam.a001)
        .add_scaled(-mc2, &t100);
    let gf = tv100
        .add_scaled(c, &fam.a010)
        .add_scaled(ck, &fam.a001)
        .add_scaled(mc2, &t100);
    let gg = fam
        .v000
        .add_scaled(-mc2, &fam.a000)
        .add_scaled(-c, &t110)
        .add_scaled(ck, &t101);
    let right = BlockMatrix {
        ff: fam.a000.clone(),
        fg: t100.clone(),
        gf: t100,
        gg: fam.a000,
    };
    Ok(Pencil {
        method: Method::Supg,
        params: *params,
        left: BlockMatrix { ff, fg, gf, gg },
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshConfig;

    fn setup() -> (PhysicalParams, Mesh) {
        let p = PhysicalParams::hydrogen_like(20, -2).unwrap();
        let m = Mesh::exponential(&MeshConfig::new(0.0, 10.0, 30, 1e-3).unwrap()).unwrap();
        (p, m)
    }

    #[test]
    fn galerkin_left_is_symmetric() {
        let (p, m) = setup();
        let pen = assemble_galerkin(&p, &m, &PotentialModel::PointNucleus).unwrap();
        assert!(pen.left.is_symmetric(1e-14));
        assert!(pen.right.is_symmetric(0.0));
        assert_eq!(pen.dim(), 60);
    }

    #[test]
    fn supg_right_has_antisymmetric_coupling() {
        let (p, m) = setup();
        let pen = assemble_supg(&p, &m, &PotentialModel::PointNucleus).unwrap();
        assert_eq!(pen.right.fg, pen.right.gf);
        assert!(!pen.right.is_symmetric(1e-6));
    }

    #[test]
    fn zero_taus_reduce_to_galerkin() {
        let (p, m) = setup();
        let model = PotentialModel::PointNucleus;
        let g = assemble_galerkin(&p, &m, &model).unwrap();
        let s = assemble_supg_with_taus(&p, &m, &model, &vec![0.0; 30]).unwrap();
        assert!(g.left.transpose().add_block_diff(&s.left.transpose()) < 1e-12 * g.left.max_abs());
        assert!(assemble_supg_with_taus(&p, &m, &model, &[0.0; 3]).is_err());
    }

    #[test]
    fn dense_and_get_agree() {
        let (p, m) = setup();
        let pen = assemble_supg(&p, &m, &PotentialModel::PointNucleus).unwrap();
        let d = pen.left.to_dense();
        let n = pen.dim();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[i * n + j], pen.left.get(i, j));
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let y = pen.left.matvec(&x);
        for i in 0..n {
            let want: f64 = (0..n).map(|j| d[i * n + j] * x[j]).sum();
            assert!((y[i] - want).abs() <= 1e-12 * pen.left.norm_inf());
        }
    }

    impl BlockMatrix {
        fn add_block_diff(&self, o: &BlockMatrix) -> f64 {
            [
                self.ff.add_scaled(-1.0, &o.ff).max_abs(),
                self.fg.add_scaled(-1.0, &o.fg).max_abs(),
                self.gf.add_scaled(-1.0, &o.gf).max_abs(),
                self.gg.add_scaled(-1.0, &o.gg).max_abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        }
    }
}
