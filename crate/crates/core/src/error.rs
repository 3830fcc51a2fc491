use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order must satisfy 0 < beta <= 1, got {0}")]
    InvalidOrder(f64),

    #[error("coefficient series must have at least one entry")]
    EmptySeries,

    #[error("coefficient {index} is not finite ({value})")]
    NonFiniteCoefficient { index: usize, value: f64 },

    #[error("fractional power needs a positive leading coefficient, got {0}")]
    NonPositiveLeading(f64),

    #[error("series reciprocal needs a nonzero constant term")]
    ZeroConstantTerm,

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("grid start {grid} does not match the problem's initial time {problem}")]
    GridMismatch { grid: f64, problem: f64 },

    #[error("singular update: A0 - lambda*h^beta*Q0 vanishes at lambda*h^beta = {re}{im:+}i")]
    SingularUpdate { re: f64, im: f64 },

    #[error("singular Newton Jacobian at step {step}")]
    SingularJacobian { step: usize },

    #[error("Newton failed to converge at step {step} (last residual {residual:e})")]
    NewtonNotConverged { step: usize, residual: f64 },

    #[error("non-finite solution value at step {step}")]
    NonFiniteSolution { step: usize },

    #[error("expected a {expected} right-hand side")]
    WrongProblemKind { expected: &'static str },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularUpdate { .. }
                | Error::SingularJacobian { .. }
                | Error::NewtonNotConverged { .. }
                | Error::NonFiniteSolution { .. }
        )
    }
}
