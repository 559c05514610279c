//! Banded matrices, LU with partial pivoting and Cholesky.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Column-major band storage with `kl` extra rows on top for the fill-in of
/// a pivoted LU: entry `(i, j)` lives at `data[j * ld + ku2 + i - j]` with
/// `ku2 = kl + ku` and `ld = 2 kl + ku + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ld = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * ld],
        }
    }

    /// Build from `f(i, j)` evaluated inside the band.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(
        n: usize,
        kl: usize,
        ku: usize,
        mut f: F,
    ) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for j in 0..n {
            for i in j.saturating_sub(ku)..(j + kl + 1).min(n) {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn ld(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn index(&self, i: usize, j: usize) -> Option<usize> {
        let ku2 = self.kl + self.ku;
        if i >= self.n || j >= self.n || i + ku2 < j || i > j + self.kl {
            None
        } else {
            Some(j * self.ld() + ku2 + i - j)
        }
    }

    /// Entry `(i, j)`, zero outside the stored band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.index(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Set an entry inside the band `-kl..=ku`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i <= j + self.kl && j <= i + self.ku && i < self.n && j < self.n,
            "({i}, {j}) outside the band"
        );
        let k = self.index(i, j).expect("checked above");
        self.data[k] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (j, xj) in x.iter().enumerate() {
            for (i, yi) in y
                .iter_mut()
                .enumerate()
                .take((j + self.kl + 1).min(self.n))
                .skip(j.saturating_sub(self.ku))
            {
                *yi += self.get(i, j) * xj;
            }
        }
        y
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.n];
        for j in 0..self.n {
            for (i, r) in rows
                .iter_mut()
                .enumerate()
                .take((j + self.kl + 1).min(self.n))
                .skip(j.saturating_sub(self.ku))
            {
                *r += libm::fabs(self.get(i, j));
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// `self + s * other` for matrices with identical band structure.
    pub fn add_scaled(&self, s: f64, other: &BandMatrix) -> BandMatrix {
        assert!(self.n == other.n && self.kl == other.kl && self.ku == other.ku);
        BandMatrix {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    /// `max |a_ij - a_ji| <= tol * max |a_ij|`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let w = self.kl.max(self.ku);
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
        for j in 0..self.n {
            for i in (j + 1)..(j + w + 1).min(self.n) {
                if libm::fabs(self.get(i, j) - self.get(j, i)) > tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

/// Band LU factorisation `P A = L U` (LINPACK/LAPACK `gbtrf` layout).
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
    pivot_ratio: f64,
}

impl BandLu {
    /// Factorise; exactly zero pivots are replaced by a tiny multiple of the
    /// column scale so that near-singular shifted systems remain usable.
    /// Inspect [`BandLu::pivot_ratio`] to detect singularity.
    pub fn factor(a: &BandMatrix) -> Self {
        let mut lu = a.clone();
        let n = lu.n;
        let kl = lu.kl;
        let ku2 = lu.kl + lu.ku;
        let ld = lu.ld();
        let scale = lu.data.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
        let mut pivots = vec![0; n];
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
        let at = |i: usize, j: usize| j * ld + ku2 + i - j;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = libm::fabs(lu.data[at(k, k)]);
            for i in k + 1..=last {
                let v = libm::fabs(lu.data[at(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[k] = p;
            let jlast = (k + ku2).min(n - 1);
            if p != k {
                for j in k..=jlast {
                    lu.data.swap(at(k, j), at(p, j));
                }
            }
            pmin = pmin.min(best);
            pmax = pmax.max(best);
            if best == 0.0 {
                lu.data[at(k, k)] = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
            }
            let piv = lu.data[at(k, k)];
            for i in k + 1..=last {
                lu.data[at(i, k)] /= piv;
            }
            for j in k + 1..=jlast {
                let ukj = lu.data[at(k, j)];
                if ukj == 0.0 {
                    continue;
                }
                for i in k + 1..=last {
                    let l = lu.data[at(i, k)];
                    lu.data[at(i, j)] -= l * ukj;
                }
            }
        }
        let pivot_ratio = if pmax > 0.0 { pmin / pmax } else { 0.0 };
        BandLu {
            lu,
            pivots,
            pivot_ratio,
        }
    }

    /// Factorise and fail with [`Error::Singular`] when
    /// `min |u_kk| / max |u_kk| < threshold`.
    pub fn factor_checked(a: &BandMatrix, threshold: f64) -> Result<Self> {
        let f = Self::factor(a);
        if !(f.pivot_ratio >= threshold) {
            return Err(Error::Singular {
                pivot_ratio: f.pivot_ratio,
            });
        }
        Ok(f)
    }

    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    /// Overwrite `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.lu.n;
        assert_eq!(b.len(), n);
        let kl = self.lu.kl;
        let ku2 = self.lu.kl + self.lu.ku;
        let ld = self.lu.ld();
        let d = &self.lu.data;
        let at = |i: usize, j: usize| j * ld + ku2 + i - j;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= d[at(i, k)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            b[k] /= d[at(k, k)];
            let bk = b[k];
            if bk != 0.0 {
                for i in k.saturating_sub(ku2)..k {
                    b[i] -= d[at(i, k)] * bk;
                }
            }
        }
    }
}

/// Band Cholesky factor `A = L L^T` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    w: usize,
    /// Row `i` holds `L(i, i-w..=i)`.
    l: Vec<f64>,
}

impl BandCholesky {
    /// Uses the lower band of `a`; fails when `a` is not positive definite.
    pub fn factor(a: &BandMatrix) -> Result<Self> {
        let n = a.dim();
        let w = a.lower_bandwidth();
        let mut l = vec![0.0; n * (w + 1)];
        let idx = |i: usize, j: usize| i * (w + 1) + w + j - i;
        for i in 0..n {
            for j in i.saturating_sub(w)..=i {
                let mut s = a.get(i, j);
                for k in i.saturating_sub(w)..j {
                    s -= l[idx(i, k)] * l[idx(j, k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::Singular { pivot_ratio: 0.0 });
                    }
                    l[idx(i, i)] = libm::sqrt(s);
                } else {
                    l[idx(i, j)] = s / l[idx(j, j)];
                }
            }
        }
        Ok(BandCholesky { n, w, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.w
    }

    /// `L(i, j)` for `i - w <= j <= i`, zero elsewhere.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i >= self.n || i - j > self.w {
            0.0
        } else {
            self.l[i * (self.w + 1) + self.w + j - i]
        }
    }

    /// Overwrite `b` with `L^{-1} b`.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let w = self.w;
        for i in 0..self.n {
            let row = &self.l[i * (w + 1)..(i + 1) * (w + 1)];
            let lo = i.saturating_sub(w);
            let mut s = b[i];
            for k in lo..i {
                s -= row[w + k - i] * b[k];
            }
            b[i] = s / row[w];
        }
    }
}
