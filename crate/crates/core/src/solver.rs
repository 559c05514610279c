//! Eigenvalues of an assembled pencil and the bound-state window.
//!
//! Both paths reduce `A u = lambda B u` to a standard problem after
//! permuting unknowns to `f_1, g_1, f_2, g_2, ...`, which makes both
//! matrices banded with half-bandwidth 3:
//! * symmetric `A`, positive definite `B`: `B = L L^T`,
//!   `C = L^-1 A L^-T`, Householder tridiagonalisation and implicit QL;
//! * otherwise: banded LU of `B`, `C = B^-1 A`, balancing, Hessenberg
//!   reduction and Francis double-shift QR.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{BlockMatrix, Pencil};
use crate::error::{Error, Result};
use crate::linalg::dense::{general_eigenvalues, symmetric_eigenvalues};
use crate::linalg::{BandCholesky, BandLu, BandMatrix, DenseMatrix};
use crate::physics::PhysicalParams;

/// Half-bandwidth of an interleaved pencil matrix.
pub const INTERLEAVED_BANDWIDTH: usize = 3;

/// Complex eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// Which reduction produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    SymmetricDefinite,
    General,
}

impl SolverPath {
    pub fn name(&self) -> &'static str {
        match self {
            SolverPath::SymmetricDefinite => "symmetric-definite",
            SolverPath::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Right matrix is rejected when `min |pivot| / max |pivot|` falls below this.
    pub singular_threshold: f64,
    /// Relative tolerance for treating the left matrix as symmetric.
    pub symmetry_tolerance: f64,
    /// Skip the symmetric path even when it applies.
    pub force_general: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            singular_threshold: 1e-14,
            symmetry_tolerance: 1e-12,
            force_general: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverDiagnostics {
    pub path: SolverPath,
    pub dimension: usize,
    /// `min |pivot| / max |pivot|` of the right matrix factorisation.
    pub pivot_ratio: f64,
    /// Largest `|Im|` over the whole spectrum.
    pub max_imaginary: f64,
}

/// All `2n` eigenvalues of a pencil, sorted by real part.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSpectrum {
    pub eigenvalues: Vec<Eigenvalue>,
    pub diagnostics: SolverDiagnostics,
}

/// Interleaved band form of a block matrix: block entry `(a, b)` at `(i, j)`
/// goes to `(2i + a, 2j + b)`.
pub fn interleave(m: &BlockMatrix) -> BandMatrix {
    let n = m.block_dim();
    BandMatrix::from_fn(
        2 * n,
        INTERLEAVED_BANDWIDTH,
        INTERLEAVED_BANDWIDTH,
        |r, c| {
            let (i, a) = (r / 2, r % 2);
            let (j, b) = (c / 2, c % 2);
            m.get(i + a * n, j + b * n)
        },
    )
}

pub fn solve_pencil(pencil: &Pencil) -> Result<RawSpectrum> {
    solve_pencil_with(pencil, &SolverOptions::default())
}

pub fn solve_pencil_with(pencil: &Pencil, opts: &SolverOptions) -> Result<RawSpectrum> {
    let a = interleave(&pencil.left);
    let b = interleave(&pencil.right);
    solve_band_pencil(&a, &b, opts)
}

/// Generalised eigenvalues of a banded pencil.
pub fn solve_band_pencil(
    a: &BandMatrix,
    b: &BandMatrix,
    opts: &SolverOptions,
) -> Result<RawSpectrum> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Config("pencil matrices differ in size".into()));
    }
    if !opts.force_general
        && a.is_symmetric(opts.symmetry_tolerance)
        && b.is_symmetric(opts.symmetry_tolerance)
    {
        if let Ok(chol) = BandCholesky::factor(b) {
            let diag: Vec<f64> = (0..n).map(|i| chol.get(i, i) * chol.get(i, i)).collect();
            let ratio = pivot_ratio(&diag);
            if ratio < opts.singular_threshold {
                return Err(Error::Singular { pivot_ratio: ratio });
            }
            // Householder from the last row plus QL wants the large entries,
            // here those of the smallest elements, at the bottom right.
            let c = congruence(a, &chol).reversed();
            let mut values = symmetric_eigenvalues(c)?;
            values.sort_by(f64::total_cmp);
            return Ok(RawSpectrum {
                eigenvalues: values
                    .into_iter()
                    .map(|re| Eigenvalue { re, im: 0.0 })
                    .collect(),
                diagnostics: SolverDiagnostics {
                    path: SolverPath::SymmetricDefinite,
                    dimension: n,
                    pivot_ratio: ratio,
                    max_imaginary: 0.0,
                },
            });
        }
    }
    let lu = BandLu::factor_checked(b, opts.singular_threshold)?;
    let c = left_division(a, &lu);
    let mut values: Vec<Eigenvalue> = general_eigenvalues(c)?
        .into_iter()
        .map(|(re, im)| Eigenvalue { re, im })
        .collect();
    values.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    let max_imaginary = values.iter().fold(0.0f64, |m, e| m.max(libm::fabs(e.im)));
    Ok(RawSpectrum {
        eigenvalues: values,
        diagnostics: SolverDiagnostics {
            path: SolverPath::General,
            dimension: n,
            pivot_ratio: lu.pivot_ratio(),
            max_imaginary,
        },
    })
}

fn pivot_ratio(diag: &[f64]) -> f64 {
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
        (lo.min(libm::fabs(*d)), hi.max(libm::fabs(*d)))
    });
    if hi > 0.0 {
        lo / hi
    } else {
        0.0
    }
}

/// Dense `L^-1 A L^-T`, symmetrised.
fn congruence(a: &BandMatrix, chol: &BandCholesky) -> DenseMatrix {
    let n = a.dim();
    let w = chol.bandwidth();
    let kl = a.lower_bandwidth();
    let ku = a.upper_bandwidth();
    // W = L^-1 A, row by row: W_i = (A_i - sum_k L_ik W_k) / L_ii
    let mut wmat = DenseMatrix::zeros(n);
    for i in 0..n {
        let mut row = vec![0.0; n];
        for (j, r) in row
            .iter_mut()
            .enumerate()
            .take((i + ku + 1).min(n))
            .skip(i.saturating_sub(kl))
        {
            *r = a.get(i, j);
        }
        for k in i.saturating_sub(w)..i {
            let lik = chol.get(i, k);
            if lik != 0.0 {
                for (r, v) in row.iter_mut().zip(wmat.row(k)) {
                    *r -= lik * v;
                }
            }
        }
        let lii = chol.get(i, i);
        for (dst, r) in wmat.row_mut(i).iter_mut().zip(&row) {
            *dst = r / lii;
        }
    }
    // C_i = L^-1 W_i^T for every row
    for i in 0..n {
        chol.forward_in_place(wmat.row_mut(i));
    }
    wmat.symmetrize();
    wmat
}

/// Dense `B^-1 A` column by column.
fn left_division(a: &BandMatrix, lu: &BandLu) -> DenseMatrix {
    let n = a.dim();
    let kl = a.lower_bandwidth();
    let ku = a.upper_bandwidth();
    let mut c = DenseMatrix::zeros(n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|x| *x = 0.0);
        for (i, x) in col
            .iter_mut()
            .enumerate()
            .take((j + kl + 1).min(n))
            .skip(j.saturating_sub(ku))
        {
            *x = a.get(i, j);
        }
        lu.solve_in_place(&mut col);
        for (i, x) in col.iter().enumerate() {
            c.set(i, j, *x);
        }
    }
    c
}

/// Selection window for bound states, relative to `mc^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundWindow {
    /// Keep shifted energies above `-2 mc^2 (1 - delta_w)`.
    pub continuum_margin: f64,
    /// Keep shifted energies below `-threshold * mc^2`.
    pub threshold: f64,
    /// Drop values with `|Im| > imaginary_tolerance * |Re|`.
    pub imaginary_tolerance: f64,
    /// Merge values closer than `duplicate_tolerance * mc^2`.
    pub duplicate_tolerance: f64,
}

impl Default for BoundWindow {
    fn default() -> Self {
        BoundWindow {
            continuum_margin: 1e-3,
            threshold: 1e-6,
            imaginary_tolerance: 1e-6,
            duplicate_tolerance: 1e-12,
        }
    }
}

impl BoundWindow {
    /// Open interval of admissible shifted energies.
    pub fn bounds(&self, rest_energy: f64) -> (f64, f64) {
        (
            -2.0 * rest_energy * (1.0 - self.continuum_margin),
            -self.threshold * rest_energy,
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiscardCounts {
    /// At or above the upper window edge.
    pub positive_continuum: usize,
    /// At or below the lower window edge.
    pub negative_continuum: usize,
    pub complex: usize,
    pub duplicates: usize,
}

/// Shifted bound-state energies, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSpectrum {
    pub values: Vec<f64>,
    pub window: BoundWindow,
    pub discarded: DiscardCounts,
}

impl BoundSpectrum {
    /// Lowest `count` values, or [`Error::InsufficientStates`].
    pub fn lowest(&self, count: usize) -> Result<&[f64]> {
        if self.values.len() < count {
            return Err(Error::InsufficientStates {
                requested: count,
                found: self.values.len(),
            });
        }
        Ok(&self.values[..count])
    }

    /// Keep only the lowest `count` values.
    pub fn truncated(mut self, count: usize) -> Result<Self> {
        self.lowest(count)?;
        self.values.truncate(count);
        Ok(self)
    }
}

/// Shift by `-mc^2`, apply the window and deduplicate; all survivors kept.
pub fn bound_states(
    raw: &RawSpectrum,
    params: &PhysicalParams,
    window: &BoundWindow,
) -> BoundSpectrum {
    let mc2 = params.rest_energy();
    let (lo, hi) = window.bounds(mc2);
    let mut discarded = DiscardCounts::default();
    let mut kept = Vec::new();
    for e in &raw.eigenvalues {
        if libm::fabs(e.im) > window.imaginary_tolerance * libm::fabs(e.re) {
            discarded.complex += 1;
            continue;
        }
        let shifted = e.re - mc2;
        if shifted >= hi {
            discarded.positive_continuum += 1;
        } else if shifted <= lo {
            discarded.negative_continuum += 1;
        } else {
            kept.push(shifted);
        }
    }
    kept.sort_by(f64::total_cmp);
    let mut values: Vec<f64> = Vec::with_capacity(kept.len());
    for v in kept {
        match values.last() {
            Some(&prev) if v - prev < window.duplicate_tolerance * mc2 => discarded.duplicates += 1,
            _ => values.push(v),
        }
    }
    BoundSpectrum {
        values,
        window: *window,
        discarded,
    }
}

/// Bound states with the default window, requiring at least `count`.
pub fn select_bound_states(
    raw: &RawSpectrum,
    params: &PhysicalParams,
    count: usize,
) -> Result<BoundSpectrum> {
    bound_states(raw, params, &BoundWindow::default()).truncated(count)
}

/// Relative residual `|A y - lambda B y|_inf / (|A|_inf |y|_inf)` of the
/// eigenvector obtained by inverse iteration at the unshifted `lambda`.
pub fn eigen_residual(pencil: &Pencil, lambda: f64) -> f64 {
    let a = interleave(&pencil.left);
    let b = interleave(&pencil.right);
    band_residual(&a, &b, lambda)
}

/// Residuals for several eigenvalues sharing one interleaving.
pub fn eigen_residuals(pencil: &Pencil, lambdas: &[f64]) -> Vec<f64> {
    let a = interleave(&pencil.left);
    let b = interleave(&pencil.right);
    lambdas.iter().map(|&l| band_residual(&a, &b, l)).collect()
}

fn band_residual(a: &BandMatrix, b: &BandMatrix, lambda: f64) -> f64 {
    let n = a.dim();
    let shifted = a.add_scaled(-lambda, b);
    let lu = BandLu::factor(&shifted);
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * (i % 7) as f64).collect();
    for _ in 0..3 {
        let mut rhs = b.matvec(&y);
        lu.solve_in_place(&mut rhs);
        let scale = inf_norm(&rhs);
        if !(scale > 0.0 && scale.is_finite()) {
            break;
        }
        y = rhs.into_iter().map(|v| v / scale).collect();
    }
    let ay = a.matvec(&y);
    let by = b.matvec(&y);
    let r: Vec<f64> = ay.iter().zip(&by).map(|(p, q)| p - lambda * q).collect();
    inf_norm(&r) / (a.norm_inf() * inf_norm(&y))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(libm::fabs(*x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Method;
    use crate::fem::TriDiag;

    fn diagonal_pencil(d: &[f64], e: &[f64], method: Method) -> Pencil {
        let n = d.len() / 2;
        let tri = |v: &[f64]| TriDiag::from_parts(vec![0.0; n], v.to_vec(), vec![0.0; n]).unwrap();
        let z = TriDiag::zeros(n);
        Pencil {
            method,
            params: PhysicalParams::hydrogen_like(1, -1).unwrap(),
            left: BlockMatrix::new(tri(&d[..n]), z.clone(), z.clone(), tri(&d[n..])).unwrap(),
            right: BlockMatrix::new(tri(&e[..n]), z.clone(), z.clone(), tri(&e[n..])).unwrap(),
        }
    }

    #[test]
    fn diagonal_pencil_both_paths() {
        let p = diagonal_pencil(&[3.0, -1.0, 2.0, 5.0], &[1.0; 4], Method::Galerkin);
        let sym = solve_pencil(&p).unwrap();
        assert_eq!(sym.diagnostics.path, SolverPath::SymmetricDefinite);
        let gen = solve_pencil_with(
            &p,
            &SolverOptions {
                force_general: true,
                ..SolverOptions::default()
            },
        )
        .unwrap();
        assert_eq!(gen.diagnostics.path, SolverPath::General);
        for s in [sym, gen] {
            let re: Vec<f64> = s.eigenvalues.iter().map(|e| e.re).collect();
            assert_eq!(re.len(), 4);
            for (g, w) in re.iter().zip([-1.0, 2.0, 3.0, 5.0]) {
                assert!((g - w).abs() < 1e-14);
            }
        }
        let scaled = diagonal_pencil(
            &[3.0, -1.0, 2.0, 5.0],
            &[2.0, 1.0, 4.0, 0.5],
            Method::Galerkin,
        );
        let s = solve_pencil(&scaled).unwrap();
        let re: Vec<f64> = s.eigenvalues.iter().map(|e| e.re).collect();
        for (g, w) in re.iter().zip([-1.0, 0.5, 1.5, 10.0]) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_right_matrix_is_reported() {
        let p = diagonal_pencil(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 1.0], Method::Supg);
        let e = solve_pencil(&p).unwrap_err();
        assert!(matches!(e, Error::Singular { .. }));
    }

    #[test]
    fn window_arithmetic() {
        let params = PhysicalParams::hydrogen_like(1, -1).unwrap();
        let mc2 = params.rest_energy();
        let eig = |re: f64, im: f64| Eigenvalue { re, im };
        let raw = RawSpectrum {
            eigenvalues: vec![
                eig(0.5 * mc2, 0.0),
                eig(1.5 * mc2, 0.0),
                eig(3.0 * mc2, 0.0),
                eig(-1.5 * mc2, 0.0),
                eig(0.6 * mc2, 0.1 * mc2),
                eig(0.5 * mc2 + 1e-15 * mc2, 0.0),
            ],
            diagnostics: SolverDiagnostics {
                path: SolverPath::General,
                dimension: 6,
                pivot_ratio: 1.0,
                max_imaginary: 0.1 * mc2,
            },
        };
        let b = bound_states(&raw, &params, &BoundWindow::default());
        assert_eq!(b.values.len(), 1);
        assert!((b.values[0] + 0.5 * mc2).abs() < 1e-9 * mc2);
        assert_eq!(
            b.discarded,
            DiscardCounts {
                positive_continuum: 2,
                negative_continuum: 1,
                complex: 1,
                duplicates: 1,
            }
        );
        assert!(matches!(
            select_bound_states(&raw, &params, 2),
            Err(Error::InsufficientStates {
                requested: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn interleaving_layout() {
        let p = diagonal_pencil(&[1.0, 2.0, 3.0, 4.0], &[1.0; 4], Method::Galerkin);
        let b = interleave(&p.left);
        assert_eq!(
            (b.get(0, 0), b.get(1, 1), b.get(2, 2), b.get(3, 3)),
            (1.0, 3.0, 2.0, 4.0)
        );
    }

    #[test]
    fn residual_small_at_eigenvalue() {
        let p = diagonal_pencil(&[3.0, -1.0, 2.0, 5.0], &[1.0; 4], Method::Galerkin);
        assert!(eigen_residual(&p, 2.0) < 1e-14);
        assert!(eigen_residual(&p, 2.5) > 1e-3);
    }
}
