use std::io;
use std::path::{Path, PathBuf};

use streamdrift_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{}: {reason}", path.display())]
    Config { path: PathBuf, reason: String },

    #[error("unknown preset `{name}`; available: {}", crate::presets::PRESETS.join(", "))]
    UnknownPreset { name: String },

    #[error("{}: {what} mismatch: expected {expected}, found {found}", path.display())]
    Mismatch {
        path: PathBuf,
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{}:{line}: {reason}", path.display())]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(path: &Path, line: u64, reason: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.to_path_buf(),
            line,
            reason: reason.into(),
        }
    }

    /// Process exit code: 1 for invalid input, 2 for runtime and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid { .. }
            | Error::Config { .. }
            | Error::UnknownPreset { .. }
            | Error::Mismatch { .. }
            | Error::Malformed { .. } => 1,
            Error::Core(
                CoreError::InvalidParameter { .. }
                | CoreError::InvalidSchedule(_)
                | CoreError::InvalidDimension(..),
            ) => 1,
            Error::Io { .. } | Error::Csv { .. } | Error::Core(_) => 2,
        }
    }
}
