use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-physical state: smallest symplectic eigenvalue {nu_minus} < 1")]
    NonPhysicalState { nu_minus: f64 },

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),

    #[error("oracle root-finding did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("argument {value} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// Short machine-readable tag, used in the `error` column of result rows.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPhysicalState { .. } => "NonPhysicalState",
            Error::DegenerateMatrix(_) => "DegenerateMatrix",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::DomainError { .. } => "DomainError",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::UnsupportedState(_) => "UnsupportedState",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::UnknownFigure(_) => "UnknownFigure",
        }
    }
}
