//! Crate-wide error type with process exit-code mapping.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration value. `field` is the config path, e.g.
    /// `[constraint].delta_max`.
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or incompatible binary artifact (turbulence box, checkpoint).
    #[error("bad artifact {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("surrogate training failed: {0}")]
    Training(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// Runtime failure that is not a config or i/o problem.
    #[error("{0}")]
    Runtime(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code contract: 0 success, 1 runtime, 2 config, 3 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Io { .. } | Error::Format { .. } => 3,
            _ => 1,
        }
    }
}
