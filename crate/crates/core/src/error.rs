use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = DmmopError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DmmopError {
    #[error("unknown problem `{0}` (expected P1..P24)")]
    UnknownProblem(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("evaluation budget exhausted: the instance is frozen")]
    Frozen,

    #[error("environment {env} out of range 1..={max}")]
    EnvironmentOutOfRange { env: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed {what} at line {line}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("metric contract violated: {0}")]
    Metric(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DmmopError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DmmopError::Io {
            path: path.into(),
            source,
        }
    }
}
