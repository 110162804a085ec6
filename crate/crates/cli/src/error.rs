//! Pipeline-level errors and their process exit codes.

use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::DatasetError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Dataset {
        path: PathBuf,
        #[source]
        source: DatasetError,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] peakcast_core::Error),
}

impl PipelineError {
    /// 1 for configuration/IO problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Numeric(_) => 2,
            _ => 1,
        }
    }
}
