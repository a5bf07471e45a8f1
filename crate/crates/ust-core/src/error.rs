//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by sampling and measurement operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A lattice point or vertex lies outside the domain of the operation.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// A statistic could not be computed because the quantity it needs is
    /// clipped by the sampling window.
    #[error("window truncation: {0}")]
    Truncated(String),

    /// A random walk exceeded its step budget; almost surely a
    /// misconfiguration rather than bad luck.
    #[error("step budget of {budget} exceeded: {context}")]
    StepBudget { budget: u64, context: String },

    /// An exact algorithm was asked for an instance above its size cap.
    #[error("instance too large: {0}")]
    Capacity(String),

    /// Invalid argument value.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Text-format parse failure, with 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A structural invariant of a loaded or constructed tree is violated.
    #[error("integrity error: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
