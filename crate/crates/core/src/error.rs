use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::quotient::RaoViolation;

/// Errors produced by the constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must live on the same point set do not.
    #[error("point sets do not match")]
    DomainMismatch,

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("duplicate point label {0}")]
    DuplicatePoint(String),

    #[error("unknown point label {0}")]
    UnknownPoint(String),

    /// An input violates a documented precondition of the operation.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal identity that the construction guarantees failed to hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("negative total mass")]
    NegativeTotalMass,

    #[error("depth {requested} exceeds measure depth {depth}")]
    DepthOutOfRange { requested: usize, depth: usize },

    #[error("point set of size {size} exceeds brute-force cap {cap}")]
    BruteForceCap { size: usize, cap: usize },

    /// `y == z` in a closeness evaluation.
    #[error("closeness is undefined when y = z")]
    DegenerateTriple,

    #[error("invalid quotient data: {0:?}")]
    InvalidQuotient(Vec<RaoViolation>),

    #[error("point labels are not the binary words of one depth")]
    NotDyadic,
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// Whether the error reports a violated input precondition (as opposed to
    /// a malformed input or a broken internal identity).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Precondition(_)
                | Error::NegativeTotalMass
                | Error::DepthOutOfRange { .. }
                | Error::BruteForceCap { .. }
                | Error::DegenerateTriple
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
