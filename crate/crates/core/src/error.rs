use thiserror::Error;

/// Every failure surfaced by the library. Variant names double as the
/// machine-readable error codes emitted by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is reducible over Q: {0}")]
    Reducible(String),
    #[error("interval does not isolate exactly one real root ({0} roots found)")]
    NotIsolating(usize),
    #[error("elements live in different number fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("aperiodicity check failed: p({n}) = {count} < {n} + 1")]
    AperiodicityCheckFailed { n: usize, count: usize },
    #[error("odometer base {0} is smaller than 2")]
    DegenerateBase(u64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time parameter is rational; the time-t map is not minimal")]
    RationalTime,
    #[error("trace-range modules with distinct irrational denominator units are not supported")]
    UnsupportedUnits,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("word is not legal for this system: {0}")]
    IllegalWord(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    HorizonTooLarge { needed: u128, budget: u128 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Reducible(_) => "Reducible",
            Error::NotIsolating(_) => "NotIsolating",
            Error::FieldMismatch => "FieldMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotPrimitive => "NotPrimitive",
            Error::NotSquare(..) => "NotSquare",
            Error::AperiodicityCheckFailed { .. } => "AperiodicityCheckFailed",
            Error::DegenerateBase(_) => "DegenerateBase",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RationalTime => "RationalTime",
            Error::UnsupportedUnits => "UnsupportedUnits",
            Error::MalformedCertificate(_) => "MalformedCertificate",
            Error::IllegalWord(_) => "IllegalWord",
            Error::HorizonTooLarge { .. } => "HorizonTooLarge",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
