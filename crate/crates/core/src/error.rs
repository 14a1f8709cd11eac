//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the statistical and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative evaluation hit its iteration cap before converging.
    #[error("{what} did not converge within {max_iter} iterations")]
    NonConvergence {
        what: &'static str,
        max_iter: usize,
    },

    /// Adaptive quadrature exhausted its subdivision budget with the error
    /// estimate still above tolerance.
    #[error(
        "quadrature failed: error estimate {error:.3e} exceeds tolerance {tolerance:.3e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureFailure {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    /// Too few observations for the requested statistic.
    #[error("need at least {min} data points, got {n}")]
    TooFewPoints { n: usize, min: usize },

    /// One of the coordinates has zero sample variance.
    #[error("sample variance of {coordinate} is zero")]
    DegenerateVariance { coordinate: &'static str },

    /// |r| is too close to 1 for the posterior to be evaluated.
    #[error("sample correlation r = {r} is numerically degenerate (|r| too close to 1)")]
    PerfectCorrelation { r: f64 },

    /// The sample covariance is exactly zero, so only the forward OLS slope
    /// is defined. The slope is carried in the error.
    #[error("sample covariance is zero; only the OLS slope b1 = {b1} is defined")]
    ZeroCovariance { b1: f64 },

    /// More than 10% of bootstrap draws produced an undefined estimate.
    #[error("estimator undefined on {failed} of {attempts} bootstrap draws")]
    EstimatorUndefined { failed: usize, attempts: usize },

    /// A simulation sub-task failed; wraps the first underlying error.
    #[error("simulation failed: {0}")]
    Simulation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
