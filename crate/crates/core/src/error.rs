use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between reading a recording and writing a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Validation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("SMO did not converge after {iterations} iterations (max KKT violation {max_violation:.3e}, tolerance {tolerance:.1e})")]
    NonConvergence {
        iterations: usize,
        max_violation: f64,
        tolerance: f64,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse class used by the command line for exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::Validation(_) | Error::InsufficientData(_) => {
                ErrorKind::Validation
            }
            Error::Training(_) | Error::NonConvergence { .. } => ErrorKind::Training,
            Error::Io { .. } | Error::Json(_) => ErrorKind::Io,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Training,
    Io,
}
