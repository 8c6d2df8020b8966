use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qcap_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Input(String),

    #[error("validation failed: {0}")]
    Invalid(String),
}

impl CliError {
    /// Process exit code: 3 for resource caps, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(qcap_core::Error::ResourceCap { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
