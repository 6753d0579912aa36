use std::io;
use std::path::{Path, PathBuf};

pub type Result<T, E = ToolkitError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum ToolkitError {
    #[error(transparent)]
    Validation(#[from] ess_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{origin}: {message}")]
    Malformed { origin: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl ToolkitError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        ToolkitError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(origin: impl Into<String>, message: impl ToString) -> Self {
        ToolkitError::Malformed {
            origin: origin.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status: 1 for I/O failures, 2 for anything a caller could
    /// fix by changing the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolkitError::Io { .. } => 1,
            _ => 2,
        }
    }
}
