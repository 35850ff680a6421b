use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParamRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("forced generation infeasible: {0}")]
    ForcedInfeasible(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("insufficient samples: found {found}, need {needed}")]
    InsufficientSamples { found: usize, needed: usize },
}
