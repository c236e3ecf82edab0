//! Experiment runner for first passage percolation on the configuration
//! model: configuration, seeded replicate pipelines, CSV output, summary
//! reports and the validation suite.

pub mod config;
pub mod record;
pub mod report;
pub mod runner;
pub mod validate;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig};
pub use record::{csv_schema, ReplicateRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] record::CsvError),
    #[error("csv output: {0}")]
    CsvWrite(#[from] csv::Error),
    #[error(transparent)]
    Limit(#[from] fppcm_core::limit_laws::LimitError),
    #[error("statistics: {0}")]
    Stats(String),
    #[error("unknown criterion {0}")]
    Criterion(u8),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
