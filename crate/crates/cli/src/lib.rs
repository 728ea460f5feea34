//! Config-driven experiment runner: `gen`, `run`, `report` and `plot`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod plot;

pub use commands::{cmd_gen, cmd_plot, cmd_report, cmd_run, execute, Cli};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
