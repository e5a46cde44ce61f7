use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("task {task}: need {needed} validated samples, only {available} available")]
    Shortfall {
        task: String,
        needed: usize,
        available: usize,
    },

    #[error("example sets are misaligned ({}): missing ids {}", .context, .missing.join(", "))]
    Alignment { context: String, missing: Vec<String> },

    #[error("missing aggregate for {0}")]
    MissingAggregate(String),

    #[error("{rejected} of {total} prediction lines rejected")]
    Rejected { rejected: usize, total: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("generation request failed: {0}")]
    Generation(String),

    #[error("run directory {0} is locked by another writer")]
    Locked(PathBuf),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    /// Network and generation failures may succeed when retried.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::Generation(_))
    }
}
