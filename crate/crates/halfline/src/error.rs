//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Problem metadata violated at least one structural invariant.
    /// Each entry names the failed check.
    #[error("problem validation failed: {}", failures.join("; "))]
    InvalidProblem { failures: Vec<String> },

    /// The requested configuration admits no contractive formulation,
    /// for example a Lipschitz budget of 1 or more.
    #[error("unsolvable configuration: {0}")]
    Unsolvable(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An argument violated a documented precondition of the called operation.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// Adaptive quadrature could not reach the requested accuracy.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// An iteration produced non-finite values.
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// A study or check required a converged solve and did not get one.
    #[error("solver did not converge: {0}")]
    Unconverged(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
