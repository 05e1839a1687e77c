//! Command-line workflows: device certification, state discrimination and
//! guessing-probability sweeps, driven by a reproducible run configuration.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Args, RunConfig};
pub use error::{CliError, ExitStatus};
pub use run::run;
