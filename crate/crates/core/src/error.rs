use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("exponent s must be non-negative, got {0}")]
    NegativeExponent(f64),

    #[error("pressure bracket failure: {0}")]
    BracketFailure(String),

    #[error("budget exceeded: {expanded} nodes expanded, cap is {cap}")]
    BudgetExceeded { expanded: u64, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point lies outside the ball of exponent {v_min}")]
    OutsideBall { v_min: i64 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("map {map} is not contractive: norm is q^{norm_exponent}")]
    ContractivityViolation { map: usize, norm_exponent: i64 },

    #[error("map {map} is singular")]
    SingularMap { map: usize },

    #[error("p = {0} is not a supported prime")]
    NonPrimeP(u64),

    #[error("invariant breach: {0}")]
    InvariantBreach(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::ContractivityViolation { .. }
            | Error::SingularMap { .. }
            | Error::NonPrimeP(_)
            | Error::InvalidArgument(_)
            | Error::NegativeExponent(_) => 2,
            Error::PrecisionExhausted(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            _ => 5,
        }
    }
}
