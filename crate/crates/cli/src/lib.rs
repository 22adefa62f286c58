//! Experiment runner: configuration files, parameter sweeps, CSV and SVG output.

pub mod config;
pub mod csv;
pub mod runner;
pub mod svg;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{load_config, parse_config, ConfigError, ExperimentKind, ExperimentSpec, SnrAxis, Sweep};
pub use runner::{run_experiment, Mode, Row, RunOutput, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(ConfigError),
    #[error("runtime error: {0}")]
    Runtime(#[from] cimsr::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration problems, 3 for everything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) | Self::Io { .. } => 3,
        }
    }
}
