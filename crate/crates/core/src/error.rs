use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("machine has no infinite behavior: no initial state survives trimming")]
    EmptyAfterTrim,

    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },

    #[error("path enumeration exceeded the node budget of {budget}")]
    DepthBudgetExceeded { budget: usize },

    #[error("window set has no initial windows")]
    EmptyWindows,

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("state `{0}` is not reachable")]
    UnreachableState(String),

    #[error("quantizer blocks external behavior: {}", .0.join("; "))]
    Blocking(Vec<String>),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
