//! Radial meshes and the per-node stability parameter.
//!
//! Node indices follow the usual finite element numbering: `r_0 = a`,
//! `r_{n+1} = b`, interior nodes `1..=n`. Step `h_j = r_j - r_{j-1}` for
//! `j = 1..=n+1` and `tau_j = (h_{j+1} - h_j) / 3` for interior `j`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Parameters of an exponentially graded mesh on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshConfig {
    pub start: f64,
    pub end: f64,
    /// Number of interior nodes `n`.
    pub interior_nodes: usize,
    /// Node intensity `eps`: smaller values pull nodes towards `start`.
    pub intensity: f64,
}

impl MeshConfig {
    pub fn new(start: f64, end: f64, interior_nodes: usize, intensity: f64) -> Result<Self> {
        let cfg = MeshConfig {
            start,
            end,
            interior_nodes,
            intensity,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start >= 0.0 && self.start.is_finite()) {
            return Err(Error::Config(format!(
                "mesh start must be >= 0, got {}",
                self.start
            )));
        }
        if !(self.end > self.start && self.end.is_finite()) {
            return Err(Error::Config(format!(
                "mesh end {} must exceed start {}",
                self.end, self.start
            )));
        }
        if self.interior_nodes < 2 {
            return Err(Error::Config(format!(
                "need at least 2 interior nodes, got {}",
                self.interior_nodes
            )));
        }
        if !(self.intensity > 0.0 && self.intensity <= 1.0) {
            return Err(Error::Config(format!(
                "node intensity must lie in (0, 1], got {}",
                self.intensity
            )));
        }
        Ok(())
    }

    /// Ratio `h_{j+1} / h_j` of consecutive steps.
    pub fn step_ratio(&self) -> f64 {
        libm::exp(self.log_increment())
    }

    fn log_increment(&self) -> f64 {
        let eps = self.intensity;
        (libm::log(self.end + eps) - libm::log(self.start + eps)) / (self.interior_nodes + 1) as f64
    }
}

/// Immutable 1D mesh with cached steps and stability parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    steps: Vec<f64>,
    taus: Vec<f64>,
}

impl Mesh {
    /// Nodes `r_i = exp(ln(a+eps) + i (ln(b+eps) - ln(a+eps)) / (n+1)) - eps`.
    pub fn exponential(cfg: &MeshConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.interior_nodes;
        let d = cfg.log_increment();
        let base = cfg.start + cfg.intensity;
        // a + (a+eps)(e^{i d} - 1) is the same node, written without the
        // cancellation of exp(..) - eps near the origin.
        let mut nodes: Vec<f64> = (0..=n + 1)
            .map(|i| cfg.start + base * libm::expm1(i as f64 * d))
            .collect();
        nodes[0] = cfg.start;
        nodes[n + 1] = cfg.end;
        Self::from_nodes(nodes)
    }

    /// Equally spaced nodes (all `tau_j = 0`).
    pub fn uniform(start: f64, end: f64, interior_nodes: usize) -> Result<Self> {
        if interior_nodes < 2 || !(end > start) {
            return Err(Error::Config(format!(
                "uniform mesh needs end > start and >= 2 interior nodes (got [{start}, {end}], n = {interior_nodes})"
            )));
        }
        let h = (end - start) / (interior_nodes + 1) as f64;
        let mut nodes: Vec<f64> = (0..=interior_nodes + 1)
            .map(|i| start + i as f64 * h)
            .collect();
        nodes[interior_nodes + 1] = end;
        let mut mesh = Self::from_nodes(nodes)?;
        // node differences carry rounding; the spacing is one number
        mesh.steps.iter_mut().for_each(|s| *s = h);
        mesh.taus.iter_mut().for_each(|t| *t = 0.0);
        Ok(mesh)
    }

    /// Mesh from explicit, strictly increasing node coordinates.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(Error::Config(format!(
                "need at least 4 nodes, got {}",
                nodes.len()
            )));
        }
        if !nodes.iter().all(|r| r.is_finite()) || nodes[0] < 0.0 {
            return Err(Error::Config(
                "nodes must be finite and non-negative".into(),
            ));
        }
        let steps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(k) = steps.iter().position(|&h| h <= 0.0) {
            return Err(Error::Config(format!(
                "nodes must be strictly increasing (r_{} = {} >= r_{} = {})",
                k,
                nodes[k],
                k + 1,
                nodes[k + 1]
            )));
        }
        let taus = steps.windows(2).map(|w| (w[1] - w[0]) / 3.0).collect();
        Ok(Mesh { nodes, steps, taus })
    }

    /// Concatenate two meshes sharing the node `self.end() == other.start()`.
    /// The shared node becomes an interior node of the result.
    pub fn join(&self, other: &Mesh) -> Result<Self> {
        if self.end() != other.start() {
            return Err(Error::Config(format!(
                "cannot join meshes ending at {} and starting at {}",
                self.end(),
                other.start()
            )));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes[1..]);
        Self::from_nodes(nodes)
    }

    /// Interior node count `n`.
    pub fn interior_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// All steps; `steps()[k] = h_{k+1} = r_{k+1} - r_k`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// `h_j = r_j - r_{j-1}` for `j` in `1..=n+1`.
    pub fn step(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.steps.len() {
            return Err(Error::Index {
                index: j,
                lo: 1,
                hi: self.steps.len(),
            });
        }
        Ok(self.steps[j - 1])
    }

    /// Stability parameters of the interior nodes; `taus()[j-1] = tau_j`.
    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    /// `tau_j = (h_{j+1} - h_j) / 3` for interior node `j` in `1..=n`.
    pub fn tau(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.taus.len() {
            return Err(Error::Index {
                index: j,
                lo: 1,
                hi: self.taus.len(),
            });
        }
        Ok(self.taus[j - 1])
    }

    /// Index `k` of the element `[r_{k-1}, r_k]` containing `r`, using the
    /// left-limit convention at interior nodes. `None` outside `[a, b]`.
    pub fn element_containing(&self, r: f64) -> Option<usize> {
        if r < self.start() || r > self.end() {
            return None;
        }
        // first node >= r
        let k = self.nodes.partition_point(|&x| x < r);
        Some(k.max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interior_node_formula() {
        // n = 1 is below the assembly minimum, so check the node formula directly.
        let cfg = MeshConfig {
            start: 0.0,
            end: 1.0,
            interior_nodes: 1,
            intensity: 1.0,
        };
        let d = cfg.log_increment();
        let mid = cfg.start + (cfg.start + cfg.intensity) * libm::expm1(d);
        assert!((mid - (core::f64::consts::SQRT_2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn endpoints_are_exact() {
        let cfg = MeshConfig::new(1.5e-4, 48.0, 600, 1e-4).unwrap();
        let m = Mesh::exponential(&cfg).unwrap();
        assert_eq!(m.nodes().len(), 602);
        assert_eq!(m.start(), 1.5e-4);
        assert_eq!(m.end(), 48.0);
        assert_eq!(m.interior_count(), 600);
    }

    #[test]
    fn config_validation() {
        assert!(MeshConfig::new(0.0, 1.0, 10, 0.0).is_err());
        assert!(MeshConfig::new(0.0, 1.0, 10, 1.5).is_err());
        assert!(MeshConfig::new(1.0, 1.0, 10, 0.5).is_err());
        assert!(MeshConfig::new(-1.0, 1.0, 10, 0.5).is_err());
        assert!(MeshConfig::new(0.0, 1.0, 1, 0.5).is_err());
        assert!(MeshConfig::new(0.0, 1.0, 2, 1.0).is_ok());
    }

    #[test]
    fn tau_examples() {
        let u = Mesh::uniform(0.0, 1.0, 9).unwrap();
        assert!(u.taus().iter().all(|t| t.abs() < 1e-15));
        let m = Mesh::from_nodes(vec![0.0, 1.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.tau(1).unwrap(), 1.0);
        assert_eq!(m.tau(2).unwrap(), -1.0);
        assert!(m.tau(0).is_err());
        assert!(m.tau(3).is_err());
        assert_eq!(m.step(2).unwrap(), 4.0);
        assert!(m.step(4).is_err());
    }

    #[test]
    fn exponential_taus_are_positive() {
        let cfg = MeshConfig::new(0.0, 48.0, 600, 1e-4).unwrap();
        let m = Mesh::exponential(&cfg).unwrap();
        assert!(m.taus().iter().all(|&t| t > 0.0));
    }

    #[test]
    fn rejects_non_monotone_nodes() {
        assert!(Mesh::from_nodes(vec![0.0, 1.0, 1.0, 2.0]).is_err());
        assert!(Mesh::from_nodes(vec![0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn join_shares_the_interface_node() {
        let a = Mesh::uniform(0.0, 1.0, 3).unwrap();
        let b = Mesh::uniform(1.0, 3.0, 4).unwrap();
        let j = a.join(&b).unwrap();
        assert_eq!(j.interior_count(), 3 + 1 + 4);
        assert!(b.join(&a).is_err());
    }

    #[test]
    fn element_lookup_uses_left_limit() {
        let m = Mesh::from_nodes(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.element_containing(0.0), Some(1));
        assert_eq!(m.element_containing(1.0), Some(1));
        assert_eq!(m.element_containing(1.5), Some(2));
        assert_eq!(m.element_containing(3.0), Some(3));
        assert_eq!(m.element_containing(3.5), None);
    }
}
