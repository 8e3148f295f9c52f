use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the toolkit.
///
/// Variants fall into two families that map onto process exit codes:
/// validation problems (bad input shape, bad config, missing files) and
/// data-integrity problems (input that parses but contradicts chain semantics).
#[derive(Debug, Error)]
pub enum Error {
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

    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },

    #[error("decode error in tx {tx_hash} log {log_index}: {message}")]
    Decode {
        tx_hash: String,
        log_index: u64,
        message: String,
    },

    #[error("data integrity: {0}")]
    Integrity(String),
}

impl Error {
    pub fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error: 1 for validation, 2 for data integrity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Invalid { .. } => 1,
            Error::Decode { .. } | Error::Integrity(_) => 2,
        }
    }
}
