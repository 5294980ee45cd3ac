//! Error type shared by the whole crate.
//!
//! Errors split into two families that the CLI maps to distinct exit codes:
//! [`DqError::Parse`] (exit 1) and everything else (exit 2, mathematical
//! domain errors).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DqError {
    /// Syntax error in the text grammar, with a byte offset into the input.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    /// Binary series operations require equal truncation orders; re-truncate
    /// explicitly with `HbarSeries::truncate` first.
    #[error("truncation order mismatch: {0} vs {1} (re-truncate explicitly)")]
    OrderMismatch(usize, usize),

    #[error("series is not invertible: constant term is zero")]
    NonInvertibleSeries,

    #[error("expected a multivector of degree {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("operator of arity {arity} applied to {args} arguments")]
    ArityMismatch { arity: usize, args: usize },

    #[error("variable index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),

    /// Any other mathematical domain error (non-constant Moyal tensor,
    /// bivector extraction failure, malformed star product, ...).
    #[error("{0}")]
    Domain(String),
}

impl DqError {
    pub fn domain(msg: impl Into<String>) -> Self {
        DqError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, DqError>;
