use thiserror::Error;

use crate::dsl::ParseError;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient mode mismatch: cannot combine exact and floating polynomials")]
    ModeMismatch,

    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("tensor rank p+q = {rank} exceeds the cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },

    #[error("tensor type mismatch: ({0},{1}) vs ({2},{3})")]
    TypeMismatch(usize, usize, usize, usize),

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("not semi-quasihomogeneous for this grading: {0}")]
    NotSemiQuasihomogeneous(String),

    #[error("balance is not verified: {0}")]
    UnverifiedBalance(String),

    #[error("fixed-point analysis requires F(0) = 0")]
    NoFixedPointAtOrigin,

    #[error("linear system too large: {slots} unknowns x {constraints} constraints exceeds {limit} entries; lower the rank cap or degree")]
    SystemTooLarge {
        slots: usize,
        constraints: usize,
        limit: usize,
    },

    #[error("internal verification failure: {0}")]
    Verification(String),

    #[error("numeric oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
