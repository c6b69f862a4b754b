use thiserror::Error;

pub type Result<T> = std::result::Result<T, MarkoffError>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarkoffError {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("level {0} outside the supported range |k| < 2^62")]
    LevelOutOfRange(i128),
    #[error("descent did not terminate within {0} steps")]
    DescentLimit(u64),
    #[error("k = 4 has infinitely many orbits; a Cayley bound is required")]
    CayleyUnbounded,
    #[error("modulus {0} exceeds the brute-force limit")]
    ModulusTooLarge(u64),
    #[error("{0} is not a valid prime for this operation")]
    InvalidPrime(i64),
    #[error("closed-form density is not available at level {0}")]
    UnsupportedLevel(i64),
    #[error("degenerate pair ({0}, {1})")]
    DegeneratePair(i64, i64),
    #[error("bound {0} exceeds the brute-force limit")]
    BoundTooLarge(u64),
    #[error("orbit search left the working box of size {0}")]
    WorkingBoxExceeded(u64),
    #[error("range needs about {needed} bytes, budget is {budget}")]
    RangeTooLarge { needed: u64, budget: u64 },
    #[error("configuration violation: {0}")]
    ConfigViolation(String),
    #[error("point lies on the Cayley cubic (k = 4)")]
    NotOnCayleyShiftedSurface,
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}
