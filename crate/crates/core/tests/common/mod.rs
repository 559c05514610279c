#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss-Legendre nodes and weights on [-1, 1] from the Jacobi matrix
/// eigenproblem (Golub-Welsch).
pub fn gauss_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Hat function of node `k` on element `e` (between nodes e-1 and e):
/// (value, slope).
fn hat_on(nodes: &[f64], k: usize, e: usize, r: f64) -> (f64, f64) {
    let (x0, x1) = (nodes[e - 1], nodes[e]);
    let h = x1 - x0;
    if k == e {
        ((r - x0) / h, 1.0 / h)
    } else if k + 1 == e {
        ((x1 - r) / h, -1.0 / h)
    } else {
        (0.0, 0.0)
    }
}

/// Integral of `phi_row^(rho) phi_col^(sigma) w(r) / r^nu` over the shared
/// support, by the given rule per element, each element optionally split at `split`.
#[allow(clippy::too_many_arguments)]
pub fn entry(
    nodes: &[f64],
    row: usize,
    col: usize,
    rho: u8,
    sigma: u8,
    nu: i32,
    w: &dyn Fn(f64) -> f64,
    rule: &(Vec<f64>, Vec<f64>),
    split: Option<f64>,
) -> f64 {
    let (k, l) = (row + 1, col + 1);
    let mut total = 0.0;
    for e in k.max(l)..=(k.min(l) + 1) {
        let (x0, x1) = (nodes[e - 1], nodes[e]);
        let mut pieces = vec![(x0, x1)];
        if let Some(s) = split {
            if s > x0 && s < x1 {
                pieces = vec![(x0, s), (s, x1)];
            }
        }
        for (lo, hi) in pieces.into_iter().flat_map(|(lo, hi)| graded(lo, hi)) {
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (t, wt) in rule.0.iter().zip(&rule.1) {
                let r = mid + half * t;
                let (a, da) = hat_on(nodes, k, e, r);
                let (b, db) = hat_on(nodes, l, e, r);
                let f = if rho == 1 { da } else { a };
                let g = if sigma == 1 { db } else { b };
                total += wt * half * f * g * w(r) / r.powi(nu);
            }
        }
    }
    total
}

/// Panels `[lo + w 4^-(k+1), lo + w 4^-k]`, each at least a third of its
/// width away from the origin, so 1/r stays smooth on every panel.
fn graded(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let w = hi - lo;
    let mut out = Vec::new();
    let mut right = hi;
    for k in 1..=60 {
        let left = lo + w * 0.25f64.powi(k);
        out.push((left, right));
        right = left;
        if right - lo <= lo {
            break;
        }
    }
    out.push((lo, right));
    out
}

/// SplitMix64 for reproducible random meshes.
pub struct Rng(pub u64);

impl Rng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo.ln(), hi.ln()).exp()
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}
