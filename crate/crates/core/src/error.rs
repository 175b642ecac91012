use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented invariant (Hermiticity, trace, norm, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Arguments are individually valid but inconsistent (dimension mismatch, t < t').
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A parameter combination the model does not admit.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The integrator could not meet its tolerance within the step budget.
    #[error("solver failure at t = {last_good_time}: {reason}")]
    SolverFailure { last_good_time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
