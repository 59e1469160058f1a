use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("well-poised sum requires a != 0")]
    ZeroA,

    #[error("repeated pole at k = {0}")]
    RepeatedPole(String),

    #[error("denominator does not split into rational linear factors: {0}")]
    NotSplit(String),

    #[error("catalog schema error: {0}")]
    Schema(String),

    #[error("invariant violated in entry {id}: {reason}")]
    InvariantViolation { id: String, reason: String },

    #[error("normalized series disagrees with the theorem term at k = {k}")]
    NormalizationMismatch { k: usize },

    #[error("no index with both terms nonzero")]
    NoNonzeroTerm,

    #[error("left side is not a rational-algebraic multiple of a power of pi: {0}")]
    UnsupportedLhs(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("zero term at k = {0}")]
    ZeroTerm(usize),

    #[error("no match: {0}")]
    NoMatch(String),

    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),
}

impl Error {
    pub(crate) fn zero_den(context: impl Into<String>) -> Self {
        Error::ZeroDenominator(context.into())
    }
}
