use std::fmt;

/// A single rejected field from parameter validation.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl FieldError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self { field, message: message.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn join(errors: &[FieldError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<FieldError>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("integrator exceeded its step budget of {max_steps} at t = {t:e}")]
    StepBudget { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t:e}")]
    StepUnderflow { t: f64 },

    #[error("no root in search bracket [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("integration time {tau:e} s exceeds trajectory span {span:e} s")]
    TauOutOfRange { tau: f64, span: f64 },

    #[error("pointer states have zero steady-state separation; cannot normalize")]
    ZeroSeparation,

    #[error("pole in {0}")]
    Pole(&'static str),

    #[error("measurement outcome has zero probability for this state")]
    ImpossibleOutcome,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParams(vec![FieldError::new(field, message)])
    }

    /// Failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepBudget { .. } | Error::StepUnderflow { .. } | Error::NoBracket { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
