//! One configured computation: mesh, assembly, eigen-solve, selection and
//! classification.

use alloc::vec::Vec;

use crate::analysis::{classify, ConvergenceStudy, MatchTolerances, RunMetadata, SpectrumReport};
use crate::assembly::{assemble, Method, Pencil};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, MeshConfig};
use crate::physics::{nuclear_radius, PhysicalParams, PotentialModel};
use crate::reference;
use crate::solver::{
    bound_states, eigen_residuals, solve_pencil, BoundSpectrum, BoundWindow, SolverDiagnostics,
};

/// Default outer radius of the computational domain (atomic units).
pub const DEFAULT_DOMAIN_END: f64 = 48.0;
pub const DEFAULT_INTERIOR_NODES: usize = 600;
pub const DEFAULT_INTENSITY: f64 = 1e-4;
/// Interior nodes strictly inside the nucleus for the two-segment mesh.
pub const DEFAULT_INNER_NODES: usize = 39;

/// How the radial mesh is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshSpec {
    Exponential(MeshConfig),
    /// Two exponential meshes sharing an interface node (the nuclear radius).
    TwoSegment {
        inner: MeshConfig,
        outer: MeshConfig,
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh> {
        match self {
            MeshSpec::Exponential(cfg) => Mesh::exponential(cfg),
            MeshSpec::TwoSegment { inner, outer } => {
                Mesh::exponential(inner)?.join(&Mesh::exponential(outer)?)
            }
        }
    }

    /// Interior unknowns per spinor component.
    pub fn interior_nodes(&self) -> usize {
        match self {
            MeshSpec::Exponential(cfg) => cfg.interior_nodes,
            MeshSpec::TwoSegment { inner, outer } => {
                inner.interior_nodes + outer.interior_nodes + 1
            }
        }
    }

    pub fn intensity(&self) -> f64 {
        match self {
            MeshSpec::Exponential(cfg) => cfg.intensity,
            MeshSpec::TwoSegment { outer, .. } => outer.intensity,
        }
    }

    /// Split at `radius` with `inner_nodes` interior nodes below it and the
    /// rest of `total` above.
    pub fn two_segment(
        start: f64,
        radius: f64,
        end: f64,
        total: usize,
        inner_nodes: usize,
        intensity: f64,
    ) -> Result<Self> {
        if inner_nodes + 1 >= total {
            return Err(Error::Config(alloc::format!(
                "{inner_nodes} inner nodes leave nothing outside the nucleus of a {total}-node mesh"
            )));
        }
        if !(radius > start && radius < end) {
            return Err(Error::Config(alloc::format!(
                "nuclear radius {radius} must lie inside ({start}, {end})"
            )));
        }
        Ok(MeshSpec::TwoSegment {
            inner: MeshConfig::new(start, radius, inner_nodes, intensity)?,
            outer: MeshConfig::new(radius, end, total - inner_nodes - 1, intensity)?,
        })
    }
}

/// A complete run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    pub params: PhysicalParams,
    pub nucleus: PotentialModel,
    pub mesh: MeshSpec,
    pub window: BoundWindow,
    pub tolerances: MatchTolerances,
    /// Number of genuine levels to report.
    pub levels: usize,
}

/// Output of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub method: Method,
    pub diagnostics: SolverDiagnostics,
    /// All bound states in the window.
    pub bound: BoundSpectrum,
    /// Classified lowest values up to the last requested genuine level.
    pub report: SpectrumReport,
    /// Relative eigen-residual of every report entry.
    pub residuals: Vec<f64>,
}

impl MethodRun {
    /// Genuine levels found, at most the requested number.
    pub fn resolved_levels(&self) -> usize {
        self.report.genuine().count()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

impl Experiment {
    /// Point nucleus on `[0, 48]` with 600 exponential interior nodes.
    pub fn point_nucleus(params: PhysicalParams, levels: usize) -> Result<Self> {
        Ok(Experiment {
            params,
            nucleus: PotentialModel::PointNucleus,
            mesh: MeshSpec::Exponential(MeshConfig::new(
                0.0,
                DEFAULT_DOMAIN_END,
                DEFAULT_INTERIOR_NODES,
                DEFAULT_INTENSITY,
            )?),
            window: BoundWindow::default(),
            tolerances: MatchTolerances::default(),
            levels,
        })
    }

    /// Uniformly charged nucleus of radius `1.2 A^(1/3)` fm, 39 interior
    /// nodes inside it and 560 outside.
    pub fn extended_nucleus(
        params: PhysicalParams,
        mass_number: f64,
        levels: usize,
    ) -> Result<Self> {
        let radius = nuclear_radius(mass_number);
        Ok(Experiment {
            params,
            nucleus: PotentialModel::extended(radius)?,
            mesh: MeshSpec::two_segment(
                0.0,
                radius,
                DEFAULT_DOMAIN_END,
                DEFAULT_INTERIOR_NODES,
                DEFAULT_INNER_NODES,
                DEFAULT_INTENSITY,
            )?,
            window: BoundWindow::default(),
            tolerances: MatchTolerances::default(),
            levels,
        })
    }

    /// Point-nucleus reference configuration for the Z = 118 ion.
    pub fn reference(kappa: i32, light_speed: f64, levels: usize) -> Result<Self> {
        Self::point_nucleus(
            PhysicalParams::new(1.0, light_speed, reference::CHARGE, kappa)?,
            levels,
        )
    }

    /// Same configuration with `n` exponential interior nodes.
    pub fn with_interior_nodes(&self, n: usize) -> Result<Self> {
        let MeshSpec::Exponential(cfg) = self.mesh else {
            return Err(Error::Config(
                "node refinement needs a single exponential mesh".into(),
            ));
        };
        let mut e = *self;
        e.mesh = MeshSpec::Exponential(MeshConfig::new(cfg.start, cfg.end, n, cfg.intensity)?);
        Ok(e)
    }

    pub fn metadata(&self, method: Method) -> RunMetadata {
        RunMetadata {
            method,
            interior_nodes: self.mesh.interior_nodes(),
            intensity: self.mesh.intensity(),
            kappa: self.params.kappa(),
            charge: self.params.charge(),
            light_speed: self.params.light_speed(),
            nucleus: self.nucleus,
        }
    }

    pub fn pencil(&self, method: Method) -> Result<Pencil> {
        let mesh = self.mesh.build()?;
        assemble(method, &self.params, &mesh, &self.nucleus)
    }

    pub fn run(&self, method: Method) -> Result<MethodRun> {
        let pencil = self.pencil(method)?;
        self.run_pencil(&pencil)
    }

    /// Solve and analyse an already assembled pencil of this configuration.
    pub fn run_pencil(&self, pencil: &Pencil) -> Result<MethodRun> {
        let raw = solve_pencil(pencil)?;
        let bound = bound_states(&raw, &self.params, &self.window);
        // a short ladder is reported as is; only an empty window is an error
        if bound.values.is_empty() {
            bound.lowest(1)?;
        }
        // spurious values interleave at most one per level
        let take = bound.values.len().min(2 * self.levels + 2);
        let mut report = classify(&bound.values[..take], &self.params, &self.tolerances)?;
        let mut genuine = 0;
        let cut = report
            .entries
            .iter()
            .position(|e| {
                if !e.label.is_spurious() {
                    genuine += 1;
                }
                genuine == self.levels
            })
            .map_or(report.entries.len(), |p| p + 1);
        report.entries.truncate(cut);
        report
            .missing_levels
            .retain(|l| (*l as usize) <= self.levels);
        let report = report.with_metadata(self.metadata(pencil.method));
        let mc2 = self.params.rest_energy();
        let lambdas: Vec<f64> = report.entries.iter().map(|e| e.energy + mc2).collect();
        let residuals = eigen_residuals(pencil, &lambdas);
        Ok(MethodRun {
            method: pencil.method,
            diagnostics: raw.diagnostics,
            bound,
            report,
            residuals,
        })
    }

    /// Run `method` for each node count and gather per-level errors.
    pub fn convergence_study(
        &self,
        method: Method,
        node_counts: &[usize],
    ) -> Result<(ConvergenceStudy, Vec<MethodRun>)> {
        crate::analysis::validate_node_counts(node_counts)?;
        let mut runs = Vec::with_capacity(node_counts.len());
        for &n in node_counts {
            runs.push(self.with_interior_nodes(n)?.run(method)?);
        }
        let levels: Vec<u32> = (1..=self.levels as u32).collect();
        let reports: Vec<SpectrumReport> = runs.iter().map(|r| r.report.clone()).collect();
        let study = ConvergenceStudy::from_reports(node_counts, &levels, &reports)?;
        Ok((study, runs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::DEFAULT_LIGHT_SPEED;

    #[test]
    fn two_segment_node_count() {
        let spec = MeshSpec::two_segment(0.0, 1e-4, 48.0, 600, 39, 1e-4).unwrap();
        let mesh = spec.build().unwrap();
        assert_eq!(mesh.interior_count(), 600);
        assert_eq!(spec.interior_nodes(), 600);
        assert_eq!(mesh.node(40), 1e-4);
        assert!(MeshSpec::two_segment(0.0, 1e-4, 48.0, 40, 39, 1e-4).is_err());
        assert!(MeshSpec::two_segment(0.0, 50.0, 48.0, 600, 39, 1e-4).is_err());
    }

    #[test]
    fn small_supg_run_is_clean() {
        let e = Experiment::reference(-2, DEFAULT_LIGHT_SPEED, 5)
            .unwrap()
            .with_interior_nodes(200)
            .unwrap();
        let run = e.run(Method::Supg).unwrap();
        assert_eq!(run.report.spurious_count(), 0);
        assert_eq!(run.report.entries.len(), 5);
        assert_eq!(run.residuals.len(), 5);
        assert!(run.max_residual() < 1e-8, "{:?}", run.residuals);
        let err = run.report.level(1).unwrap().relative_error.unwrap();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn refinement_requires_single_mesh() {
        let p = PhysicalParams::new(1.0, DEFAULT_LIGHT_SPEED, 118, -2).unwrap();
        let e = Experiment::extended_nucleus(p, reference::MASS_NUMBER, 5).unwrap();
        assert!(e.with_interior_nodes(100).is_err());
    }
}
