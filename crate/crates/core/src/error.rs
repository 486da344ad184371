use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid corpus: {0}")]
    Validation(String),

    #[error("corpus file is empty")]
    EmptyCorpus,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid pattern {pattern:?}: {source}")]
    Pattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("non-finite feature value in instance {0}")]
    NonFinite(usize),

    #[error("dimension mismatch: model has {expected} features, input has {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no positive instances in the validation set")]
    NoPositives,

    #[error("need at least {needed} threads, got {got}")]
    TooFewThreads { needed: usize, got: usize },

    #[error("course {0} has no intervened threads; target density is unreachable")]
    UnreachableDensity(String),

    #[error("correlation undefined: zero variance")]
    DegenerateVariance,

    #[error("model artifact format version {found} is not supported (expected {expected})")]
    ArtifactVersion { expected: u32, found: u32 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
