use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no observations to fit{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    NoObservations { context: Option<String> },

    #[error("value `{value}` is not in the domain of attribute `{attribute}`")]
    SchemaMismatch { attribute: String, value: String },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("instance {index} conflicts with the schema: {reason}")]
    NonConforming { index: usize, reason: String },

    #[error("instance {index} has no class label; training requires supervised data")]
    UnlabeledInstance { index: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("cannot split {n} instances into {k} folds")]
    InvalidFolds { n: usize, k: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid synthetic domain: {0}")]
    InvalidSpec(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn no_observations() -> Self {
        Error::NoObservations { context: None }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
