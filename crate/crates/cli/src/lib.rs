//! Library half of the `urafocus` command-line tool: configuration
//! schema, figure presets, and experiment execution. The binary in
//! `main.rs` is a thin argument-parsing shell over this.

pub mod config;
pub mod error;
pub mod run;

pub use config::{preset, ExperimentConfig};
pub use error::{CliError, Result};
pub use run::{config_hash, execute, write_output, CsvDocument};
