use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: identifiers, shapes, probabilities, weights.
    #[error("validation error: {0}")]
    Validation(String),

    /// R_{|M'} with every M'_i empty does not produce a behaviour.
    #[error("empty restriction: every party's input subset is empty")]
    EmptyRestriction,

    /// An operation that is only defined on no-signalling behaviours
    /// received a signalling one.
    #[error("behaviour is signalling: {0}")]
    Signalling(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A work cap was hit. `done` is the amount of work completed before
    /// the abort, reported so callers can size the next attempt.
    #[error("budget exceeded in {stage}: limit {limit}, reached {done}")]
    BudgetExceeded {
        stage: &'static str,
        limit: usize,
        done: usize,
    },

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("polyhedron is empty")]
    Infeasible,

    /// An internal self-check failed. Never expected; reported instead of
    /// returning an unverified answer.
    #[error("certificate verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
