use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The configuration cannot be run as written.
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Numerics(#[from] zenobox_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record file: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for configuration and domain errors, 3 for an
    /// exhausted numerical budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numerics(e) if e.is_budget() => 3,
            Error::Numerics(
                zenobox_core::Error::Domain(_) | zenobox_core::Error::DimensionMismatch { .. },
            ) => 2,
            _ => 1,
        }
    }
}
