use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates the data model (bad record, empty entity, label clash, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Unknown metric name, bad flag value, out-of-range option.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called on inputs that break its contract.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("oracle budget exceeded: {0}")]
    Budget(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command line: 2 for user-facing input
    /// problems, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) | Error::Precondition(_) => 2,
            Error::Io { .. } | Error::Json(_) => 2,
            Error::Generation(_) | Error::Budget(_) | Error::Internal(_) => 3,
        }
    }
}
