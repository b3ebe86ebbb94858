//! Command-line front end for `abac-core`: experiment configuration, solves
//! and sweeps over `(tau, h)` grids, CSV/JSON tables, dense spectra and the
//! oracle verification suite.

pub mod cli;
pub mod config;
pub mod error;
pub mod runner;
pub mod spectrum;
pub mod table;
pub mod verify;

pub use config::{ExperimentConfig, NormChoice, OutputFormat, PreconditionerKind};
pub use error::{CliError, ExitStatus};
pub use table::{Iterations, TableRow};
