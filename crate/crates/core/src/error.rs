use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, TomographyError>;

#[derive(Debug, Error)]
pub enum TomographyError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate posterior: every particle assigns zero likelihood to the datum")]
    DegeneratePosterior,

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error on {path}: {message}")]
    Serialization { path: PathBuf, message: String },
}

impl TomographyError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        TomographyError::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TomographyError::Io {
            path: path.into(),
            source,
        }
    }
}
