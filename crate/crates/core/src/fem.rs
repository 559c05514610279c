//! Piecewise-linear hat basis and the element-integral matrices
//!
//! ```text
//! [a]_{rho sigma nu}^q (i, j) = int phi_j^(sigma) phi_i^(rho) r^(-nu) q(r) dr
//! ```
//!
//! over the interior nodes of a mesh (Dirichlet nodes `0` and `n+1` are
//! dropped). `rho` differentiates the test function `phi_i`, `sigma` the
//! trial function `phi_j`. Hat supports overlap only for adjacent nodes, so
//! every family is tridiagonal.
//!
//! Evaluation strategy:
//! * `nu = 0`, `q = 1`: closed-form rows in terms of the two adjacent steps.
//! * `1/r` and point-Coulomb weights: per-element moments
//!   `int_0^1 t^k (s + t)^-p dt` with `s = r_{k-1} / h_k`, which are
//!   logarithms plus polynomials (series for large `s`).
//! * uniformly charged nucleus: 16-point Gauss-Legendre per element, with the
//!   element split at the nuclear radius when it falls inside.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::physics::{uniform_sphere, PotentialModel};
use crate::quadrature::GaussLegendre;

/// Value of the hat function of node `j` (`0..=n+1`) at `r`.
pub fn hat_value(mesh: &Mesh, j: usize, r: f64) -> f64 {
    let nodes = mesh.nodes();
    if j >= nodes.len() {
        return 0.0;
    }
    if j > 0 && r >= nodes[j - 1] && r <= nodes[j] {
        return (r - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    }
    if j + 1 < nodes.len() && r >= nodes[j] && r <= nodes[j + 1] {
        return (nodes[j + 1] - r) / (nodes[j + 1] - nodes[j]);
    }
    0.0
}

/// Slope of the hat function of node `j` at `r` (left limit at nodes, right
/// limit at `r = a`).
pub fn hat_derivative(mesh: &Mesh, j: usize, r: f64) -> f64 {
    let Some(k) = mesh.element_containing(r) else {
        return 0.0;
    };
    let h = mesh.steps()[k - 1];
    if j == k {
        1.0 / h
    } else if j + 1 == k {
        -1.0 / h
    } else {
        0.0
    }
}

/// Tridiagonal `n x n` matrix; row `i` holds columns `i-1`, `i`, `i+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiag {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TriDiag {
    pub fn zeros(n: usize) -> Self {
        TriDiag {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
        }
    }

    /// `sub[i]` is entry `(i, i-1)` and `sup[i]` is `(i, i+1)`; `sub[0]` and
    /// `sup[n-1]` must be zero.
    pub fn from_parts(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if sub.len() != n || sup.len() != n || n == 0 {
            return Err(Error::Config(
                "tridiagonal parts must have equal nonzero length".into(),
            ));
        }
        if sub[0] != 0.0 || sup[n - 1] != 0.0 {
            return Err(Error::Config(
                "corner entries outside the matrix must be zero".into(),
            ));
        }
        Ok(TriDiag { sub, diag, sup })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.dim() || j >= self.dim() {
            0.0
        } else if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.sub[i]
        } else if j == i + 1 {
            self.sup[i]
        } else {
            0.0
        }
    }

    fn add_to(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else if j + 1 == i {
            self.sub[i] += v;
        } else if j == i + 1 {
            self.sup[i] += v;
        } else {
            unreachable!("entry ({i}, {j}) outside the tridiagonal band");
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut t = TriDiag::zeros(n);
        for i in 0..n {
            t.diag[i] = self.diag[i];
            if i + 1 < n {
                t.sup[i] = self.sub[i + 1];
                t.sub[i + 1] = self.sup[i];
            }
        }
        t
    }

    pub fn scaled(&self, s: f64) -> Self {
        let f = |v: &Vec<f64>| v.iter().map(|x| s * x).collect();
        TriDiag {
            sub: f(&self.sub),
            diag: f(&self.diag),
            sup: f(&self.sup),
        }
    }

    /// `diag(w) * self`: row `i` multiplied by `w[i]`.
    pub fn rows_scaled(&self, w: &[f64]) -> Self {
        assert_eq!(w.len(), self.dim(), "row weights must match the dimension");
        let f = |v: &Vec<f64>| v.iter().zip(w).map(|(x, s)| s * x).collect();
        TriDiag {
            sub: f(&self.sub),
            diag: f(&self.diag),
            sup: f(&self.sup),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &TriDiag) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let f = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        TriDiag {
            sub: f(&self.sub, &other.sub),
            diag: f(&self.diag, &other.diag),
            sup: f(&self.sup, &other.sup),
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.sub[i] + self.diag[i] + self.sup[i]
    }

    pub fn max_abs(&self) -> f64 {
        self.sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .fold(0.0f64, |m, x| m.max(libm::fabs(*x)))
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i.saturating_sub(1)..(i + 2).min(n) {
                d[i * n + j] = self.get(i, j);
            }
        }
        d
    }
}

/// Derivative orders and inverse-radius power of an element integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegralSpec {
    /// Derivative order on the test function, `rho`.
    pub test_order: u8,
    /// Derivative order on the trial function, `sigma`.
    pub trial_order: u8,
    /// Power of `1/r`, `nu`.
    pub inverse_power: u8,
}

impl IntegralSpec {
    pub const MASS: IntegralSpec = IntegralSpec::raw(0, 0, 0);
    pub const TEST_DERIVATIVE: IntegralSpec = IntegralSpec::raw(1, 0, 0);
    pub const TRIAL_DERIVATIVE: IntegralSpec = IntegralSpec::raw(0, 1, 0);
    pub const STIFFNESS: IntegralSpec = IntegralSpec::raw(1, 1, 0);
    pub const INVERSE_RADIUS: IntegralSpec = IntegralSpec::raw(0, 0, 1);
    pub const TEST_DERIVATIVE_INVERSE_RADIUS: IntegralSpec = IntegralSpec::raw(1, 0, 1);

    const fn raw(test_order: u8, trial_order: u8, inverse_power: u8) -> Self {
        IntegralSpec {
            test_order,
            trial_order,
            inverse_power,
        }
    }

    /// Linear elements only support first derivatives and `nu <= 1`.
    pub fn new(test_order: u8, trial_order: u8, inverse_power: u8) -> Result<Self> {
        let spec = Self::raw(test_order, trial_order, inverse_power);
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.test_order > 1 || self.trial_order > 1 || self.inverse_power > 1 {
            return Err(Error::Config(format!(
                "unsupported integral ({}{}{}): orders and power must be 0 or 1",
                self.test_order, self.trial_order, self.inverse_power
            )));
        }
        Ok(())
    }
}

/// Weight function `q` of an element integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight<'a> {
    Unit,
    Potential {
        model: &'a PotentialModel,
        charge: f64,
    },
}

impl Weight<'_> {
    fn eval(&self, r: f64) -> f64 {
        match *self {
            Weight::Unit => 1.0,
            Weight::Potential { model, charge } => match *model {
                PotentialModel::PointNucleus => -charge / r,
                PotentialModel::ExtendedUniform { radius } => uniform_sphere(charge, radius, r),
            },
        }
    }
}

/// Assemble `[a]_{rho sigma nu}^q` with closed forms or analytic moments
/// where available.
pub fn assemble_integral(mesh: &Mesh, spec: IntegralSpec, weight: Weight<'_>) -> Result<TriDiag> {
    spec.validate()?;
    match weight {
        Weight::Unit if spec.inverse_power == 0 => Ok(closed_form(mesh, spec)),
        Weight::Unit => element_loop(mesh, spec, |x0, h, poly| {
            analytic_element(x0, h, poly, u32::from(spec.inverse_power), 1.0)
        }),
        Weight::Potential { model, charge } => match *model {
            PotentialModel::PointNucleus => element_loop(mesh, spec, |x0, h, poly| {
                analytic_element(x0, h, poly, u32::from(spec.inverse_power) + 1, -charge)
            }),
            PotentialModel::ExtendedUniform { radius } => {
                let rule = GaussLegendre::new(16);
                element_loop(mesh, spec, |x0, h, poly| {
                    let power = u32::from(spec.inverse_power) + 1;
                    if x0 >= radius {
                        return analytic_element(x0, h, poly, power, -charge);
                    }
                    let inner = (radius - x0).min(h);
                    // polynomial inside the sphere, Coulomb tail outside
                    let core = gauss_element(
                        &rule,
                        x0,
                        inner,
                        &restrict(poly, 0.0, inner / h),
                        spec.inverse_power,
                        &weight,
                        None,
                    );
                    if inner >= h {
                        return Ok(core);
                    }
                    let tail = restrict(poly, inner / h, 1.0 - inner / h);
                    Ok(core + analytic_element(radius, h - inner, &tail, power, -charge)?)
                })
            }
        },
    }
}

/// Assemble the same family purely by per-element Gauss-Legendre quadrature.
pub fn assemble_integral_gauss(
    mesh: &Mesh,
    spec: IntegralSpec,
    weight: Weight<'_>,
    rule: &GaussLegendre,
) -> Result<TriDiag> {
    spec.validate()?;
    let split = match weight {
        Weight::Potential { model, .. } => model.radius(),
        Weight::Unit => None,
    };
    element_loop(mesh, spec, |x0, h, poly| {
        Ok(gauss_element(
            rule,
            x0,
            h,
            poly,
            spec.inverse_power,
            &weight,
            split,
        ))
    })
}

/// Rows from the standard linear-element integrals in terms of `h_j`, `h_{j+1}`.
fn closed_form(mesh: &Mesh, spec: IntegralSpec) -> TriDiag {
    let n = mesh.interior_count();
    let h = mesh.steps();
    let mut m = TriDiag::zeros(n);
    for i in 0..n {
        // interior node j = i + 1 has left step h[i] and right step h[i + 1]
        let (hl, hr) = (h[i], h[i + 1]);
        let (lo, mid, hi) = match (spec.test_order, spec.trial_order) {
            (0, 0) => (hl / 6.0, (hl + hr) / 3.0, hr / 6.0),
            (1, 0) => (0.5, 0.0, -0.5),
            (0, 1) => (-0.5, 0.0, 0.5),
            _ => (-1.0 / hl, 1.0 / hl + 1.0 / hr, -1.0 / hr),
        };
        m.diag[i] = mid;
        if i > 0 {
            m.sub[i] = lo;
        }
        if i + 1 < n {
            m.sup[i] = hi;
        }
    }
    m
}

/// Quadratic `c0 + c1 t + c2 t^2` in the element coordinate `t = (r - r_{k-1}) / h`.
type Quadratic = [f64; 3];

/// Local shape factor: value (`order = 0`) or slope of the left/right hat.
fn shape(right: bool, order: u8, h: f64) -> [f64; 2] {
    match (right, order) {
        (false, 0) => [1.0, -1.0],
        (true, 0) => [0.0, 1.0],
        (false, _) => [-1.0 / h, 0.0],
        (true, _) => [1.0 / h, 0.0],
    }
}

fn product(a: [f64; 2], b: [f64; 2]) -> Quadratic {
    [a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1]]
}

/// Run `element` over every element and scatter into the interior matrix.
fn element_loop<F>(mesh: &Mesh, spec: IntegralSpec, mut element: F) -> Result<TriDiag>
where
    F: FnMut(f64, f64, &Quadratic) -> Result<f64>,
{
    let n = mesh.interior_count();
    let nodes = mesh.nodes();
    let mut m = TriDiag::zeros(n);
    for k in 1..=n + 1 {
        let x0 = nodes[k - 1];
        let h = nodes[k] - x0;
        for test_right in [false, true] {
            let test_node = if test_right { k } else { k - 1 };
            if test_node == 0 || test_node > n {
                continue;
            }
            for trial_right in [false, true] {
                let trial_node = if trial_right { k } else { k - 1 };
                if trial_node == 0 || trial_node > n {
                    continue;
                }
                let poly = product(
                    shape(test_right, spec.test_order, h),
                    shape(trial_right, spec.trial_order, h),
                );
                let v = element(x0, h, &poly)?;
                m.add_to(test_node - 1, trial_node - 1, v);
            }
        }
    }
    Ok(m)
}

/// `poly(t0 + a u)` as a quadratic in `u`.
fn restrict(poly: &Quadratic, t0: f64, a: f64) -> Quadratic {
    [
        poly[0] + t0 * (poly[1] + t0 * poly[2]),
        a * (poly[1] + 2.0 * t0 * poly[2]),
        a * a * poly[2],
    ]
}

/// `scale * int_{x0}^{x0+h} poly(t) r^-power dr` in closed form.
fn analytic_element(x0: f64, h: f64, poly: &Quadratic, power: u32, scale: f64) -> Result<f64> {
    if power == 0 {
        return Ok(scale * h * (poly[0] + poly[1] / 2.0 + poly[2] / 3.0));
    }
    let s = x0 / h;
    let moments = inverse_moments(s, power);
    let mut acc = 0.0;
    for (c, m) in poly.iter().zip(moments) {
        if *c == 0.0 {
            continue;
        }
        if !m.is_finite() {
            return Err(Error::Integration(format!(
                "integrand ~ r^-{power} is not integrable on the element starting at r = {x0}"
            )));
        }
        acc += c * m;
    }
    Ok(scale * libm::pow(h, 1.0 - f64::from(power)) * acc)
}

/// `J_k = int_0^1 t^k (s + t)^-p dt` for `k = 0, 1, 2` and `p` in `{1, 2}`.
/// Divergent moments (only possible at `s = 0`) are returned as infinity.
pub(crate) fn inverse_moments(s: f64, p: u32) -> [f64; 3] {
    debug_assert!(p == 1 || p == 2, "moments implemented for p = 1, 2");
    if s == 0.0 {
        let mut out = [f64::INFINITY; 3];
        for (k, o) in out.iter_mut().enumerate() {
            if k as u32 >= p {
                *o = 1.0 / (k as f64 - f64::from(p) + 1.0);
            }
        }
        return out;
    }
    if s >= SERIES_THRESHOLD {
        moments_series(s, p)
    } else {
        moments_recurrence(s, p)
    }
}

/// Expansion of `(s + t)^-p` in powers of `t / s`; converges for `s > 1`.
fn moments_series(s: f64, p: u32) -> [f64; 3] {
    let mut out = [0.0; 3];
    let sp = libm::pow(s, -f64::from(p));
    for (k, o) in out.iter_mut().enumerate() {
        let mut sum = 0.0;
        let mut ratio = 1.0;
        for m in 0..200 {
            let c = if p == 1 { 1.0 } else { (m + 1) as f64 };
            let term = c * ratio / (k + m + 1) as f64;
            sum += term;
            if libm::fabs(term) <= 1e-18 * libm::fabs(sum) {
                break;
            }
            ratio *= -1.0 / s;
        }
        *o = sp * sum;
    }
    out
}

/// `J_{k+1} = 1/(k+1) - s J_k` style recurrences from the logarithm.
fn moments_recurrence(s: f64, p: u32) -> [f64; 3] {
    let j0 = libm::log1p(1.0 / s);
    let j1 = 1.0 - s * j0;
    let first = [j0, j1, 0.5 - s * j1];
    if p == 1 {
        return first;
    }
    let j0 = 1.0 / (s * (s + 1.0));
    let j1 = first[0] - s * j0;
    [j0, j1, first[1] - s * j1]
}

/// Below this the forward recurrences lose at most a factor `s^2` of accuracy.
const SERIES_THRESHOLD: f64 = 4.0;

/// Gauss-Legendre element integral, split at `split` when it lies inside.
fn gauss_element(
    rule: &GaussLegendre,
    x0: f64,
    h: f64,
    poly: &Quadratic,
    inverse_power: u8,
    weight: &Weight<'_>,
    split: Option<f64>,
) -> f64 {
    let x1 = x0 + h;
    let f = |r: f64| {
        let t = (r - x0) / h;
        let p = poly[0] + t * (poly[1] + t * poly[2]);
        let inv = if inverse_power == 0 { 1.0 } else { 1.0 / r };
        p * inv * weight.eval(r)
    };
    match split {
        Some(r0) if r0 > x0 && r0 < x1 => rule.integrate(x0, r0, f) + rule.integrate(r0, x1, f),
        _ => rule.integrate(x0, x1, f),
    }
}
