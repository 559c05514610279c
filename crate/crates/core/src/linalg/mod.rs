//! Linear algebra kernels used by the eigensolver.

pub mod band;
pub mod dense;

pub use band::{BandCholesky, BandLu, BandMatrix};
pub use dense::DenseMatrix;
