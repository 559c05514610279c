use alloc::string::String;

/// Errors produced anywhere in the numerical pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Physical parameters or an energy query outside the domain of the formulas.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid mesh or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("index {index} outside {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },
    /// An element integral is divergent or could not be evaluated.
    #[error("integration failure: {0}")]
    Integration(String),
    /// The right-hand matrix of a pencil is numerically singular.
    #[error("singular matrix (pivot ratio {pivot_ratio:e})")]
    Singular { pivot_ratio: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("only {found} bound states in the selection window, {requested} requested")]
    InsufficientStates { requested: usize, found: usize },
    /// Two computed values are indistinguishable candidates for one exact level.
    #[error("matching conflict at level {level}: {first} and {second}")]
    MatchingConflict { level: u32, first: f64, second: f64 },
}

impl Error {
    /// `true` for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Integration(_)
                | Error::Singular { .. }
                | Error::NoConvergence { .. }
                | Error::InsufficientStates { .. }
                | Error::MatchingConflict { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
