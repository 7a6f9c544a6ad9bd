use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels (last change {achieved:e})")]
    Tolerance {
        tol: f64,
        achieved: f64,
        panels: usize,
        best: Vec<f64>,
    },

    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("precondition not met: {0}")]
    Precondition(String),
}
