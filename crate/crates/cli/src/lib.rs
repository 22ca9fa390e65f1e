//! Configuration, file output and batch runs for the `piezodyn` command.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod svg;
pub mod sweep;

pub use config::{preset, RunConfig, Scenario, PRESETS};
pub use error::{CliError, Result};
