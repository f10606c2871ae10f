use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: operands live in different fields")]
    FieldMismatch,
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("zero polynomial not allowed here")]
    ZeroInput,
    #[error("polynomial is not monic in z")]
    NotMonic,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is not irreducible of degree {0}")]
    BadModulus(u32),
    #[error("exact division failed: {0}")]
    DivisionNotExact(String),
    #[error("degenerate presentation: {0}")]
    Degenerate(String),
    #[error("center is not permissible: {0}")]
    Impermissible(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
