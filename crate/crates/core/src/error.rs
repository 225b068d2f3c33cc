use thiserror::Error;

/// Errors raised by the geometry, spinor and mass pipelines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The initial data cannot be evaluated (degenerate metric, horizon, ...).
    #[error("data error: {0}")]
    Data(String),
    /// Invalid numerical configuration (quadrature orders, steps, radii).
    #[error("config error: {0}")]
    Config(String),
    /// The r → ∞ extrapolation did not reach the requested tolerance.
    #[error("not converged: {0}")]
    NotConverged(String),
    /// A caller broke an operation's contract (e.g. non-Hermitian input).
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
