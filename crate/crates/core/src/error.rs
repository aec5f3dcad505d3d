use thiserror::Error;

/// Errors produced across the crate.
///
/// Diagnostics carried by variants are stored as `f64` regardless of the
/// scalar type the failing computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: String,
        found: String,
    },

    #[error("{which} is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { which: String, asymmetry: f64 },

    #[error("{which} is not positive definite")]
    NotPositiveDefinite { which: String },

    #[error("{which} contains non-finite entries")]
    NonFinite { which: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (relative change {last_change:e})")]
    FixedPointNonConvergence { iterations: usize, last_change: f64 },

    #[error("could not construct a strictly feasible starting point")]
    InfeasibleStart,

    #[error("point is not strictly feasible")]
    InfeasiblePoint,

    #[error("Newton line search failed to decrease the merit function (decrement {decrement:e}, outer iteration {outer_iteration})")]
    NewtonDivergence {
        decrement: f64,
        outer_iteration: usize,
    },

    #[error("solver did not converge: {outer_iterations} outer iterations, gap bound {gap_bound:e}, gradient norm {gradient_norm:e}")]
    SolverNonConvergence {
        outer_iterations: usize,
        gap_bound: f64,
        gradient_norm: f64,
    },

    #[error("step {step}: information matrix has eigenvalue {eigenvalue:e} below the consistency tolerance")]
    InconsistentCovariances { step: usize, eigenvalue: f64 },

    #[error("innovation covariance is singular")]
    SingularInnovation,

    #[error("horizon {horizon} exceeds the realization length {length}")]
    HorizonTooLong { horizon: usize, length: usize },

    #[error("{0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(what: &str, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        what: what.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
