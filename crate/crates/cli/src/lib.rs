//! Configuration-driven front end for billiard Wigner exports and checks.
//!
//! A run is described by one TOML file (see `configs/` for examples); any
//! key can be overridden with `--set key=value`.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_check, cmd_current, cmd_project, cmd_wigner, CheckReport, RunOutput};
pub use config::{ConfigError, Purpose, RunConfig};
pub use error::CliError;
