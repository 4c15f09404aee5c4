use thiserror::Error;

/// Errors raised by the arithmetic, parsing and analysis layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in incompatible base-field contexts")]
    ContextMismatch,

    #[error("invalid base-field context: {0}")]
    InvalidContext(String),

    #[error("cannot rebase by {e}: it does not divide the ramification index {n}")]
    RebaseDivisor { e: u64, n: u64 },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("exponent {exponent} has a denominator not dividing ram_index {ram_index}")]
    DenominatorTooLarge { exponent: String, ram_index: u64 },

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("missing field `{0}`")]
    MissingField(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("wildly ramified input: {0}")]
    Wild(String),

    #[error("cluster is not Galois-invariant")]
    NotInvariant,

    #[error("invalid lattice problem: {0}")]
    InvalidProblem(String),

    #[error("unbounded interval requires an explicit enumeration cap")]
    Unbounded,

    #[error("empty set has no index")]
    EmptySet,

    #[error("rejected request: {0}")]
    Rejected(String),

    #[error("size cap exceeded: {0}")]
    TooLarge(String),

    /// A certificate check failed. This indicates a bug, not bad input.
    #[error("soundness failure: {0}")]
    Soundness(String),
}

pub type Result<T> = std::result::Result<T, Error>;
