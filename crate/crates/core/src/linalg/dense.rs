//! Dense eigenvalue kernels: balancing, Hessenberg reduction and the Francis
//! double-shift QR iteration for general matrices; Householder
//! tridiagonalisation and implicit QL for symmetric ones.
//!
//! Only eigenvalues are computed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Config(alloc::format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `P M P` with `P` the reversal permutation (same eigenvalues).
    pub fn reversed(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[(n - 1 - i) * n + (n - 1 - j)] = self.data[i * n + j];
            }
        }
        DenseMatrix { n, data }
    }

    /// Replace by `(M + M^T) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }
}

const RADIX: f64 = 2.0;

/// Parlett-Reinsch balancing by powers of two (eigenvalues are unchanged).
pub fn balance(a: &mut DenseMatrix) {
    let n = a.n;
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += libm::fabs(a.data[j * n + i]);
                    r += libm::fabs(a.data[i * n + j]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for v in a.row_mut(i) {
                        *v *= g;
                    }
                    for j in 0..n {
                        a.data[j * n + i] *= f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Reduce to upper Hessenberg form by Householder similarity transforms.
/// Entries below the first subdiagonal are set to zero.
pub fn hessenberg(a: &mut DenseMatrix) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let scale: f64 = (k + 1..n).map(|i| libm::fabs(a.data[i * n + k])).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm2 = 0.0;
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = a.data[i * n + k] / scale;
            norm2 += v[t] * v[t];
        }
        let alpha = if v[0] > 0.0 {
            -libm::sqrt(norm2)
        } else {
            libm::sqrt(norm2)
        };
        v[0] -= alpha;
        let vtv: f64 = v[..m].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // left: rows k+1.., columns k..
        w[..n].iter_mut().for_each(|x| *x = 0.0);
        for (t, i) in (k + 1..n).enumerate() {
            let vi = v[t];
            let row = &a.data[i * n..(i + 1) * n];
            for j in k + 1..n {
                w[j] += vi * row[j];
            }
        }
        for (t, i) in (k + 1..n).enumerate() {
            let f = beta * v[t];
            let row = &mut a.data[i * n..(i + 1) * n];
            for j in k + 1..n {
                row[j] -= f * w[j];
            }
        }
        a.data[(k + 1) * n + k] = alpha * scale;
        for i in k + 2..n {
            a.data[i * n + k] = 0.0;
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a.data[i * n + k + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&v[..m]).map(|(x, y)| x * y).sum();
            if s != 0.0 {
                let f = beta * s;
                for (x, y) in row.iter_mut().zip(&v[..m]) {
                    *x -= f * y;
                }
            }
        }
    }
}

/// Maximum QL sweeps spent on a single eigenvalue of a tridiagonal matrix.
pub const MAX_QR_SWEEPS: usize = 60;

/// Total Francis sweeps allowed per row of a Hessenberg matrix.
pub const SWEEPS_PER_ROW: usize = 30;

/// Eigenvalues `(re, im)` of an upper Hessenberg matrix by the Francis
/// double-shift QR iteration. The matrix is destroyed.
pub fn hessenberg_eigenvalues(a: &mut DenseMatrix) -> Result<Vec<(f64, f64)>> {
    let n = a.n;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based accessors keep the index algebra of the classic formulation.
    let idx = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let d = &mut a.data;
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += libm::fabs(d[idx(i, j)]);
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total = 0usize;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = libm::fabs(d[idx(l - 1, l - 1)]) + libm::fabs(d[idx(l, l)]);
                if s == 0.0 {
                    s = anorm;
                }
                if libm::fabs(d[idx(l, l - 1)]) <= f64::EPSILON * s {
                    d[idx(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = d[idx(nn, nn)];
            if l == nn {
                wr[nn - 1] = x + t;
                wi[nn - 1] = 0.0;
                nn -= 1;
            } else {
                let mut y = d[idx(nn - 1, nn - 1)];
                let mut w = d[idx(nn, nn - 1)] * d[idx(nn - 1, nn)];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = libm::sqrt(libm::fabs(q));
                    x += t;
                    if q >= 0.0 {
                        z = p + libm::copysign(z, p);
                        wr[nn - 2] = x + z;
                        wr[nn - 1] = x + z;
                        if z != 0.0 {
                            wr[nn - 1] = x - w / z;
                        }
                        wi[nn - 2] = 0.0;
                        wi[nn - 1] = 0.0;
                    } else {
                        wr[nn - 2] = x + p;
                        wr[nn - 1] = x + p;
                        wi[nn - 2] = -z;
                        wi[nn - 1] = z;
                    }
                    nn -= 2;
                } else {
                    if total == SWEEPS_PER_ROW * n {
                        return Err(Error::NoConvergence { iterations: total });
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            d[idx(i, i)] -= x;
                        }
                        let s = libm::fabs(d[idx(nn, nn - 1)]) + libm::fabs(d[idx(nn - 1, nn - 2)]);
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    total += 1;
                    let (mut p, mut q, mut r);
                    let mut z;
                    let mut m = nn - 2;
                    loop {
                        z = d[idx(m, m)];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / d[idx(m + 1, m)] + d[idx(m, m + 1)];
                        q = d[idx(m + 1, m + 1)] - z - r - s;
                        r = d[idx(m + 2, m + 1)];
                        let s = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = libm::fabs(d[idx(m, m - 1)]) * (libm::fabs(q) + libm::fabs(r));
                        let v = libm::fabs(p)
                            * (libm::fabs(d[idx(m - 1, m - 1)])
                                + libm::fabs(z)
                                + libm::fabs(d[idx(m + 1, m + 1)]));
                        if u <= f64::EPSILON * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        d[idx(i, i - 2)] = 0.0;
                        if i != m + 2 {
                            d[idx(i, i - 3)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = d[idx(k, k - 1)];
                            q = d[idx(k + 1, k - 1)];
                            r = 0.0;
                            if k != nn - 1 {
                                r = d[idx(k + 2, k - 1)];
                            }
                            x = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = libm::copysign(libm::sqrt(p * p + q * q + r * r), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    d[idx(k, k - 1)] = -d[idx(k, k - 1)];
                                }
                            } else {
                                d[idx(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            let last = k != nn - 1;
                            for j in k..=nn {
                                let mut pp = d[idx(k, j)] + q * d[idx(k + 1, j)];
                                if last {
                                    pp += r * d[idx(k + 2, j)];
                                    d[idx(k + 2, j)] -= pp * z;
                                }
                                d[idx(k + 1, j)] -= pp * y;
                                d[idx(k, j)] -= pp * x;
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                let mut pp = x * d[idx(i, k)] + y * d[idx(i, k + 1)];
                                if last {
                                    pp += z * d[idx(i, k + 2)];
                                    d[idx(i, k + 2)] -= pp * r;
                                }
                                d[idx(i, k + 1)] -= pp * q;
                                d[idx(i, k)] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l + 1 >= nn {
                break;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

/// Eigenvalues of a general matrix: balance, Hessenberg, QR.
pub fn general_eigenvalues(mut a: DenseMatrix) -> Result<Vec<(f64, f64)>> {
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_eigenvalues(&mut a)
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns `(diagonal, off_diagonal)` with `off[i]` coupling `i` and `i+1`.
/// Only the lower triangle is referenced.
pub fn tridiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.n;
    let z = &mut a.data;
    let at = |i: usize, j: usize| i * n + j;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..i).map(|k| libm::fabs(z[at(i, k)])).sum();
            if scale == 0.0 {
                e[i] = z[at(i, l)];
            } else {
                for k in 0..i {
                    z[at(i, k)] /= scale;
                    h += z[at(i, k)] * z[at(i, k)];
                }
                let f = z[at(i, l)];
                let g = if f >= 0.0 {
                    -libm::sqrt(h)
                } else {
                    libm::sqrt(h)
                };
                e[i] = scale * g;
                h -= f * g;
                z[at(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z[at(j, k)] * z[at(i, k)];
                    }
                    for k in j + 1..i {
                        g += z[at(k, j)] * z[at(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * z[at(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..i {
                    let f = z[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[at(j, k)] -= f * e[k] + g * z[at(i, k)];
                    }
                }
            }
        } else {
            e[i] = z[at(i, l)];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = z[at(i, i)];
    }
    // shift so that off[i] couples i and i+1
    let off = if n > 0 { e[1..].to_vec() } else { Vec::new() };
    (d, off)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    let mut e = vec![0.0; n];
    e[..off.len()].copy_from_slice(off);
    let mut total = 0usize;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = libm::fabs(d[m]) + libm::fabs(d[m + 1]);
                if libm::fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_QR_SWEEPS {
                return Err(Error::NoConvergence { iterations: total });
            }
            iter += 1;
            total += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Eigenvalues of a symmetric matrix (lower triangle used).
pub fn symmetric_eigenvalues(a: DenseMatrix) -> Result<Vec<f64>> {
    let (d, e) = tridiagonalize(a);
    tridiagonal_eigenvalues(d, &e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn symmetric_second_difference() {
        let n = 40;
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
                a.set(i + 1, i, -1.0);
            }
        }
        let got = sorted(symmetric_eigenvalues(a).unwrap());
        for (k, g) in got.iter().enumerate() {
            let th = core::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64;
            let want = 2.0 - 2.0 * th.cos();
            assert!((g - want).abs() < 1e-13, "{k}: {g} vs {want}");
        }
    }

    #[test]
    fn general_with_complex_pair() {
        // block diag of a rotation-like 2x2 and a triangular 3x3, then a similarity
        let n = 5;
        let mut a = DenseMatrix::zeros(n);
        a.set(0, 0, 1.0);
        a.set(0, 1, -2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 1.0);
        a.set(2, 2, 3.0);
        a.set(3, 3, -4.0);
        a.set(4, 4, 0.5);
        a.set(2, 3, 7.0);
        a.set(3, 4, 1.5);
        // similarity with a unit lower-triangular S: S A S^-1
        let mut s = DenseMatrix::zeros(n);
        let mut si = DenseMatrix::zeros(n);
        for i in 0..n {
            s.set(i, i, 1.0);
            si.set(i, i, 1.0);
        }
        for i in 1..n {
            s.set(i, i - 1, 0.3 * i as f64);
            si.set(i, i - 1, -0.3 * i as f64);
        }
        for i in 2..n {
            // (S^-1)(i, i-2) for a bidiagonal S
            si.set(i, i - 2, 0.3 * i as f64 * 0.3 * (i - 1) as f64);
        }
        for i in 3..n {
            si.set(
                i,
                i - 3,
                -0.3 * i as f64 * 0.3 * (i - 1) as f64 * 0.3 * (i - 2) as f64,
            );
        }
        si.set(4, 0, 0.3 * 4.0 * 0.3 * 3.0 * 0.3 * 2.0 * 0.3 * 1.0);
        let mul = |x: &DenseMatrix, y: &DenseMatrix| {
            let mut z = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    z.set(i, j, (0..n).map(|k| x.get(i, k) * y.get(k, j)).sum());
                }
            }
            z
        };
        let id = mul(&s, &si);
        for i in 0..n {
            for j in 0..n {
                assert!((id.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let b = mul(&mul(&s, &a), &si);
        let mut ev = general_eigenvalues(b).unwrap();
        ev.sort_by(|p, q| (p.0, p.1).partial_cmp(&(q.0, q.1)).unwrap());
        let want = [(-4.0, 0.0), (0.5, 0.0), (1.0, -2.0), (1.0, 2.0), (3.0, 0.0)];
        for (g, w) in ev.iter().zip(want) {
            assert!(
                (g.0 - w.0).abs() < 1e-12 && (g.1 - w.1).abs() < 1e-12,
                "{g:?} vs {w:?}"
            );
        }
    }

    #[test]
    fn hessenberg_preserves_trace_and_shape() {
        let n = 7;
        let data: Vec<f64> = (0..n * n).map(|k| ((k * 37 % 11) as f64) - 5.0).collect();
        let mut a = DenseMatrix::from_row_major(n, data).unwrap();
        let trace: f64 = (0..n).map(|i| a.get(i, i)).sum();
        hessenberg(&mut a);
        let t2: f64 = (0..n).map(|i| a.get(i, i)).sum();
        assert!((trace - t2).abs() < 1e-12);
        for i in 2..n {
            for j in 0..i - 1 {
                assert_eq!(a.get(i, j), 0.0);
            }
        }
        let ev = hessenberg_eigenvalues(&mut a).unwrap();
        let s: f64 = ev.iter().map(|e| e.0).sum();
        assert!((s - trace).abs() < 1e-10);
    }

    #[test]
    fn shape_errors() {
        assert!(DenseMatrix::from_row_major(3, vec![0.0; 8]).is_err());
    }
}
