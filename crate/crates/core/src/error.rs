use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("composition must have rank + 1 = {expected} parts, got {got}")]
    PartCount { expected: usize, got: usize },

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("index {index} is not valid for composition {composition:?}")]
    InvalidIndex { index: usize, composition: Vec<u32> },

    #[error("index {0} is already present in the index set")]
    DuplicateIndex(usize),

    #[error("geometric factor needs a positive exponent")]
    ZeroExponent,

    #[error("coefficient overflow")]
    Overflow,

    #[error("enumeration exceeded the output cap of {cap} configurations")]
    ResourceLimit { cap: usize },

    #[error("stage {stage} out of range (m = {m})")]
    StageOutOfRange { stage: usize, m: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
