use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The CLI maps these onto exit codes: [`Error::is_exhaustion`] gives 2,
/// everything else 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input too large: {0}")]
    InputTooLarge(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("gcd of two zeros is undefined")]
    BothZero,
    #[error("sieve limit {limit} exceeds the configured maximum {max}")]
    LimitTooLarge { limit: u64, max: u64 },
    #[error("zero and units are neither prime nor composite")]
    ZeroOrUnit,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("no convergent with norm(q) <= {0}")]
    NoConvergentBelowTarget(u64),
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("vanishing regime violated: {0}")]
    VanishingViolated(String),
}

impl Error {
    /// Budget or precision exhaustion, as opposed to a validation error.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::BudgetExceeded(_) | Error::LimitTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
