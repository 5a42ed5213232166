use alloc::string::String;

/// Errors raised by the algebra, stratification, oracle and measure layers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("cyclotomic operands live at different levels")]
    LevelMismatch,
    #[error("cyclotomic number has a nonzero irrational component")]
    NotRational,
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("minor size {size} out of range for a {rows}x{cols} matrix")]
    SizeOutOfRange { size: usize, rows: usize, cols: usize },
    #[error("a coefficient denominator vanishes modulo {0}")]
    BadPrime(u64),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("map is not a submersion on the relevant locus")]
    NotSubmersion,
    #[error("open/closed decomposition does not match: {0}")]
    DecompositionMismatch(String),
    #[error("presentation unsupported: {0}")]
    PresentationUnsupported(String),
    #[error("enumeration of {needed} points exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("scale {scale} out of range for level {level}")]
    ScaleOutOfRange { scale: u32, level: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("measures live on different windows")]
    WindowMismatch,
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
