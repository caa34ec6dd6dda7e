use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation was called outside its contract (wrong shape, terminal state, empty input).
    #[error("usage error: {0}")]
    Usage(String),

    /// PAUSE was requested while the pause counter is already at its bound.
    #[error("masked action violation: PAUSE with {counter} consecutive pauses (limit {limit})")]
    MaskViolation { counter: u32, limit: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data; `line` is 1-based when known.
    #[error("data error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Data { line: Option<usize>, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn data(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Data {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
