use thiserror::Error;

/// Errors raised by evaluation, parsing, search and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("scope error: {0}")]
    Scope(String),

    #[error("value magnitude exceeds the exponent cap of {cap} bits")]
    Overflow { cap: i64 },

    #[error("argument {n} is below the domain threshold x0 = {x0}")]
    BelowDomain { n: i64, x0: i64 },

    #[error("rounding undecidable at {point}: enclosure still straddles a half-integer at {bits} bits")]
    TieUndecidable { point: String, bits: u32 },

    #[error("precision cap of {bits} bits reached: {what}")]
    PrecisionCap { bits: u32, what: String },

    #[error("not monotone: {0}")]
    NonMonotone(String),

    #[error("window too short: need length {needed}, have {have}")]
    WindowTooShort { needed: usize, have: usize },

    #[error("base point missing: shift {shift} is outside a window of length {len}")]
    BasePointMissing { shift: i64, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported inverse: {0}")]
    UnsupportedInverse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
