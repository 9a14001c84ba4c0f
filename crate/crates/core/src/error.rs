use std::path::PathBuf;

use thiserror::Error;

use crate::metrics::MetricError;
use crate::provider::ProviderError;
use crate::stats::StatsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    /// A record or input violates a documented invariant.
    #[error("invalid data: {0}")]
    Data(String),

    #[error("{path}:{line}: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("git: {0}")]
    Git(String),

    #[error(transparent)]
    Provider(#[from] ProviderError),

    #[error(transparent)]
    Metric(#[from] MetricError),

    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
