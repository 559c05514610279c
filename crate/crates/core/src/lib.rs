//! Linear finite elements, with and without streamline-upwind stabilisation,
//! for the radial Dirac eigenvalue problem of hydrogen-like ions.
//!
//! The crate is `no_std` with `alloc`; file formats and the command line live
//! in the companion `dirac-fem` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod physics;
pub mod quadrature;
pub mod reference;
pub mod solver;

pub use analysis::{classify, MatchTolerances, SpectrumReport};
pub use assembly::{assemble, BlockMatrix, Method, Pencil};
pub use error::{Error, Result};
pub use experiment::{Experiment, MeshSpec, MethodRun};
pub use fem::{assemble_integral, assemble_integral_gauss, IntegralSpec, TriDiag, Weight};
pub use mesh::{Mesh, MeshConfig};
pub use physics::{exact_eigenvalue, exact_spectrum, PhysicalParams, PotentialModel};
pub use quadrature::GaussLegendre;
pub use solver::{solve_pencil, BoundSpectrum, BoundWindow, RawSpectrum};
