use thiserror::Error;

/// Errors raised at the boundary of every operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("harmonic index must be nonzero")]
    ZeroIndex,
    #[error("length must be at least 1")]
    EmptyLength,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index ({i}, {j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("invalid bounds: need 1 <= m <= N, got N = {n}, m = {m}")]
    InvalidBounds { n: usize, m: usize },
    #[error("factor {factor} has length {len}, shorter than N = {n}")]
    FactorTooShort { factor: usize, len: usize, n: usize },
    #[error("brute-force enumeration of {tuples} tuples exceeds the guard of {guard}")]
    ExplosionGuard { tuples: u128, guard: u128 },
    #[error("sequence entry {index} is zero")]
    ZeroEntry { index: usize },
    #[error("duplicate eigenvalues: entries {first} and {second} are equal")]
    DuplicateEntries { first: usize, second: usize },
    #[error("divergent series: leading exponent must be at least 2, got {0}")]
    Divergent(u32),
    #[error("exponent must be at least 1, got {0}")]
    InvalidExponent(u32),
    #[error("k = {k} exceeds n = {n}")]
    KExceedsN { k: usize, n: usize },
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
