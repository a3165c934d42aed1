use thiserror::Error;

/// Errors raised by exposure computation, metrics, policies and parsers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("document `{doc}` is not part of the judgment pool for query `{query}`")]
    JudgmentMismatch { query: String, doc: String },

    #[error("ranking position refers to pool index {index} but the pool has {pool} documents")]
    IndexOutOfPool { index: usize, pool: usize },

    #[error("ranking contains document index {0} more than once")]
    DuplicateDocument(usize),

    #[error("invalid browsing model: {0}")]
    InvalidModel(String),

    #[error("pool of {pool} documents exceeds the enumeration cap of {cap}")]
    EnumerationCap { pool: usize, cap: usize },

    #[error("policy probabilities sum to {0}, expected 1")]
    PolicyIntegrity(f64),

    #[error("policy has no enumerable support")]
    NotEnumerable,

    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("degenerate normalization: disparity bounds coincide ({0})")]
    DegenerateNormalization(f64),

    #[error("curve needs at least 2 points, got {0}")]
    InsufficientPoints(usize),

    #[error("generalized entropy is undefined when mean exposure is zero")]
    UndefinedEntropy,

    #[error("no relevant documents for query `{0}`")]
    EmptyRelevance(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("all scores are zero after preprocessing")]
    DegenerateScores,

    #[error("invalid policy parameter: {0}")]
    InvalidPolicy(String),

    #[error("exposure value {0} is negative or not finite")]
    InvalidExposure(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
