use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MmsError {
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("search budget of {limit} nodes exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("instance generation failed for profile {profile}: {reason}")]
    Generation { profile: String, reason: String },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub type Result<T, E = MmsError> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> MmsError {
    MmsError::Argument(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> MmsError {
    MmsError::Internal(msg.into())
}
