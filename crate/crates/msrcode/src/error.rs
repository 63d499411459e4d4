use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial {poly:#x} is not irreducible of degree {degree} over GF(2)")]
    ReduciblePolynomial { poly: u32, degree: u32 },
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("inconsistent linear system")]
    InconsistentSystem,
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error(
        "eigenvalue search exhausted after {tries} candidates over a field of order {order}; \
         retry with a larger field"
    )]
    SearchExhausted { tries: u64, order: u32 },
    #[error("{erased} erasures exceed the correction radius r = {r}")]
    TooManyErasures { erased: usize, r: usize },
    #[error("node {0} is not a systematic node; use reconstruct instead")]
    NotSystematic(usize),
    #[error("expected exactly one erased node, found {0}")]
    ErasureCount(usize),
    #[error("code is not MDS: {0}")]
    NotMds(String),
    #[error("store error: {0}")]
    Store(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
