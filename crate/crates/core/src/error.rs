use thiserror::Error;

/// Errors raised by the exact and discretized layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An integer or rational parameter is outside its admissible range.
    #[error("range error: {0}")]
    Range(String),
    /// A named precondition inequality does not hold.
    #[error("condition violated: {0}")]
    Condition(String),
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    /// Malformed text input (rationals, subspace files, configs).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}

pub(crate) fn condition(msg: impl Into<String>) -> Error {
    Error::Condition(msg.into())
}
