use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by ingestion, training, persistence and evaluation.
#[derive(Debug, Error)]
pub enum RelexError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model format version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: String, found: String },

    #[error("{path}:{line}: unknown token {token:?}")]
    UnknownToken {
        token: String,
        path: PathBuf,
        line: usize,
    },

    #[error("training diverged: non-finite loss at epoch {epoch}, step {step}")]
    NonFiniteLoss { epoch: usize, step: usize },

    #[error("empty dataset: {0}")]
    EmptyDataset(&'static str),

    #[error("empty gold set: recall is undefined")]
    EmptyGold,
}

pub type Result<T> = std::result::Result<T, RelexError>;

impl RelexError {
    /// Wraps an I/O error with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RelexError::Io {
            path: path.into(),
            source,
        }
    }

    /// A parse failure at a line of a file.
    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        RelexError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
