use thiserror::Error;

/// Errors raised by the polygon, Hasse, oracle and Dwork layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid interval shape: {0}")]
    InvalidShape(String),
    #[error("p = {p} divides D = {big_d}")]
    PrimeDividesD { p: u64, big_d: u64 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("V_{k} has {size} pairs; a singleton is required")]
    NotSingleton { k: u32, size: usize },
    #[error("degenerate coefficient vector: {0}")]
    Degenerate(String),
    #[error("field size {size} exceeds guard {guard}")]
    GuardExceeded { size: u64, guard: u64 },
    #[error("inexact division by {divisor} in Newton identity step {step}")]
    InexactDivision { step: usize, divisor: u64 },
    #[error("polynomiality check failed at S({k})")]
    PolynomialityFailure { k: usize },
    #[error("L-polynomial degree check failed: {0}")]
    DegreeMismatch(String),
    #[error("Hasse diagnostic: {0}")]
    HasseDiagnostic(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
