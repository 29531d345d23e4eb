use thiserror::Error;

use crate::quadfield::FieldDescriptor;

/// Errors raised by the exact-arithmetic and certification routines.
///
/// Everything except [`Error::InvariantViolation`] reports a violated
/// precondition of the caller. An invariant violation means an identity that
/// must hold by construction failed, which points at a bug or at input that
/// slipped past validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different fields ({0} vs {1})")]
    FieldMismatch(FieldDescriptor, FieldDescriptor),

    #[error("division by zero")]
    DivisionByZero,

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("{0} is not an algebraic integer")]
    NotIntegral(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }

    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
