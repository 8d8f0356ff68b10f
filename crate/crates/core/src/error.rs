use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A mechanism, competition function or configuration violates a
    /// structural constraint (negative diffusion, non-monotone grid, ...).
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    /// The partial value and its error estimate are retained so callers can
    /// report evidence instead of silently trusting the number.
    #[error("inconclusive quadrature: partial value {partial:e}, error estimate {estimate:e}")]
    InconclusiveQuadrature { partial: f64, estimate: f64 },

    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition documented on the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An ODE/root solver or grid search could not produce a usable result.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Too few usable samples survived for a statistical estimate.
    #[error("sample depletion: {0}")]
    Depleted(String),

    /// A runtime invariant of the scheme was breached; indicates a bug.
    #[error("invariant breach: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
