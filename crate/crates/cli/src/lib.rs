//! Command line front end: settings, report files and the subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use clap::{Parser, Subcommand};

pub use commands::{run, Outcome};
pub use config::{RunArgs, Settings};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "dirac-fem",
    version,
    about = "Bound states of hydrogen-like ions from the radial Dirac equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classified spectrum of one kappa for one or both methods
    Spectrum(RunArgs),
    /// Per-level errors over a list of node counts
    Convergence(RunArgs),
    /// Galerkin and stabilised spectra side by side with spurious counts
    PollutionReport(RunArgs),
    /// Extended nucleus, one column per kappa
    Extended(RunArgs),
    /// Fit the speed of light to the reference exact values
    CalibrateC(RunArgs),
}
