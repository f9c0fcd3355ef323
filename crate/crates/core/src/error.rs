use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("unknown spawn region {0}")]
    UnknownRegion(u16),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("dangling reference: {0}")]
    Dangling(String),

    #[error("illegal structure: {0}")]
    Illegal(String),

    #[error("policy failed at step {step}: {message}")]
    PolicyAbort { step: u32, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("state dimension mismatch: file has {found}, configuration expects {expected}")]
    StateDimMismatch { expected: usize, found: usize },

    #[error("sign test undefined: {0}")]
    Undefined(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
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

    /// True for errors caused by malformed input data rather than misuse.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::StateDimMismatch { .. } | Error::Dangling(_) | Error::Io { .. }
        )
    }
}
