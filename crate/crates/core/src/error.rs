use thiserror::Error;

/// Errors produced by graph, code and harness operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range (bound {bound})")]
    VertexOutOfRange { vertex: usize, bound: usize },

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("malformed code: {0}")]
    MalformedCode(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("symbol {symbol} outside alphabet of size {q}")]
    SymbolOutOfRange { symbol: u32, q: usize },

    #[error("word is not a codeword")]
    NotACodeword,

    #[error("enumeration of {needed} items exceeds cap {cap}")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Wraps an error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &str) -> Self {
        Error::Stage { stage: stage.to_string(), source: Box::new(self) }
    }
}
