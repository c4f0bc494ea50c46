use thiserror::Error;

use crate::domain::DomainError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("dimension mismatch in {op}: {left:?} against {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("index range out of bounds in {op}")]
    OutOfRange { op: &'static str },
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("zero pivot at position {0}")]
    ZeroPivot(usize),
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("empty matrix")]
    Empty,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for faults inside the engine (an inexact division, overflow or
    /// broken invariant) as opposed to malformed input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Invariant(_)
                | Error::Domain(
                    DomainError::NotDivisible { .. }
                        | DomainError::ZeroDivisor
                        | DomainError::Overflow(_)
                )
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
