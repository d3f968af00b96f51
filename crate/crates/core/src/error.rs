use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a stated precondition (ordering, dimension, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    /// Importance weights are too degenerate for the estimate to be trusted.
    #[error("ill-conditioned proposal: effective sample size {ess:.1} of {samples} samples")]
    IllConditioned { ess: f64, samples: usize },
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical_failure(&self) -> bool {
        matches!(self, Error::Convergence(_) | Error::IllConditioned { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
