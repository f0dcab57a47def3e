//! Batch front end: flat configs in, JSON reports and CSV tables out.

pub mod catalog;
pub mod config;
pub mod output;
pub mod report;
pub mod run;

pub use catalog::{catalog, suggest, Kind, KINDS};
pub use config::{ExperimentConfig, ENV_PREFIX};
pub use output::{write_atomic, OutputDir};
pub use report::{Check, ExperimentOutcome, ExperimentReport, Table, SCHEMA_TAG, TIMESTAMP_FIELDS};
pub use run::{run, run_one};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit status; 1 is reserved for runs whose checks failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

/// The JSON schema every report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
