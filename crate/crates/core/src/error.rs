use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime modulus in [2, 2^31)")]
    InvalidModulus(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not contained in the ambient subspace")]
    NotContained,
    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,
    #[error("fields differ: GF({0}) vs GF({1})")]
    FieldMismatch(u64, u64),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("unsupported flow descriptor: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
