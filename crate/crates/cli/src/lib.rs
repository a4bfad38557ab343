//! Experiment driver behind the `specdiff` binary: configuration parsing,
//! subcommand dispatch and CSV/JSON emission.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, CliError};
pub use config::{parse_config, ConfigError, RunConfig, Subcommand};
