use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("oracle returned a non-finite value ({0})")]
    OracleFailure(&'static str),
    #[error("derivative of order {requested} requested, oracle provides up to {available}")]
    OracleOrderExceeded { requested: usize, available: usize },
    #[error("point outside the regularizer domain: {0}")]
    DomainViolation(String),
    #[error("symmetric decomposition unavailable: {0}")]
    DecompositionUnavailable(String),
    #[error("matrix is singular")]
    Singular,
    #[error("implicit solve failed: residual {residual:e} after {iterations} iterations")]
    ImplicitSolveFailed { residual: f64, iterations: usize },
    #[error("step {index} failed: {source}")]
    StepFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("outside the convergence radius: lambda*eta^2 = {0}")]
    ConvergenceRadiusExceeded(f64),
    #[error("spectrum is not real")]
    NonRealSpectrum,
    #[error("operator norm of M(t) - I reached {0} (must stay below 1)")]
    OperatorNormTooLarge(f64),
    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),
    #[error("linear optimization over an unbounded domain")]
    UnboundedDomain,
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("resource budget exceeded: {0}")]
    ResourceBudgetExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
