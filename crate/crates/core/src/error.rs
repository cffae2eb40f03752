use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed WET record: {0}")]
    MalformedRecord(String),

    #[error("record payload is not valid UTF-8")]
    InvalidUtf8,

    #[error("{path}:{line}: document has no id")]
    MissingId { path: PathBuf, line: usize },

    #[error("invalid model file {path}: {reason}")]
    ModelFormat { path: PathBuf, reason: String },

    #[error("model file {path} has version {found}, expected {expected}")]
    ModelVersion { path: PathBuf, found: u32, expected: u32 },

    #[error("insufficient training data: {0}")]
    InsufficientData(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("need at least 3 calibration scores for language {0:?}")]
    InsufficientCalibration(String),

    #[error("no perplexity buckets for language {0:?}")]
    UnknownLanguage(String),

    #[error("classifier training needs both positive and negative examples")]
    OneClassOnly,

    #[error("coherence report has {boundaries} boundaries but document has {paragraphs} paragraphs")]
    ReportMismatch { boundaries: usize, paragraphs: usize },

    #[error("need at least {needed} distinct vectors, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("document {0:?} has no quality score")]
    MissingScores(String),

    #[error("document id {0:?} is already indexed")]
    DuplicateDocId(String),

    #[error("topic model has no training example for label {0:?}")]
    MissingClass(String),

    #[error("document {0:?} carries no topic label")]
    UnlabeledDoc(String),

    #[error("vocabulary size {requested} is below the minimum of {minimum}")]
    VocabTooSmall { requested: usize, minimum: usize },

    #[error("token id {0} is not in the vocabulary")]
    UnknownId(u32),

    #[error("corpus supplies {available} filler tokens, need {needed}")]
    CorpusTooSmall { available: usize, needed: usize },

    #[error("invalid needle: {0}")]
    InvalidNeedle(String),

    #[error("a tokenizer model is required for token counts")]
    MissingTokenizer,

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("stage {stage:?} failed{}: {source}", shard.map(|s| format!(" on shard {s}")).unwrap_or_default())]
    Stage {
        stage: String,
        /// `None` for corpus-wide passes.
        shard: Option<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("report inconsistency: {0}")]
    Accounting(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn model(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::ModelFormat { path: path.into(), reason: reason.into() }
    }
}
