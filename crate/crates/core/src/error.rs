use thiserror::Error;

/// Errors raised when constructing or combining the core value types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimensions must be at least 1, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },

    #[error("domain size {m} exceeds codomain size {n}")]
    DomainExceedsCodomain { m: usize, n: usize },

    #[error("target {target} of index {index} is outside 1..={n}")]
    TargetOutOfRange {
        index: usize,
        target: usize,
        n: usize,
    },

    #[error("duplicate target {target} at indices {first} and {second}")]
    DuplicateTarget {
        target: usize,
        first: usize,
        second: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry ({row}, {col}) is not finite: {value}")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    #[error("vector entry {index} is not finite: {value}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("expected {expected} entries for the given shape, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("tolerance must satisfy 0 <= eps < 0.5, got {0}")]
    InvalidTolerance(f64),

    #[error("enumeration guard violated: {0}")]
    Guard(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
