use thiserror::Error;

/// Failure modes shared by every layer of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported ramification: {0}")]
    UnsupportedRamification(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported root of unity of order {order} over Q_{p}: {reason}")]
    UnsupportedRootOfUnity { order: u64, p: u64, reason: String },
    #[error("coefficient ring mismatch: {0}")]
    RingMismatch(String),
    #[error("unsupported operand: {0}")]
    UnsupportedOperand(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("coefficient budget exceeded: plan needs {needed} multiply-adds, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("two-path discrepancy: {0}")]
    Discrepancy(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
