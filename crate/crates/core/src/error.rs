//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural precondition failed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The fleet cannot track the field (Case 4, directly classified or
    /// discovered during deployment).
    #[error("infeasible plan: {0}; tracking will not be possible")]
    Infeasible(String),

    /// A strength window holds fewer than two samples, so no trend can be
    /// read yet. Callers skip the handoff check for this step.
    #[error("strength window not ready: {0} sample(s), need at least 2")]
    WindowNotReady(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
