use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation window: exponent {exponent} is not below order {order}")]
    TruncationWindow { exponent: i64, order: i64 },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("misaligned series: exponent {exponent} is not divisible by {k}")]
    Misaligned { exponent: i64, k: i64 },

    #[error("insufficient precision: comparison to order {requested} but series known only to order {available}")]
    InsufficientPrecision { requested: i64, available: i64 },

    #[error("divergent theta function f({a}, {b}): exponent sum must be at least 1")]
    DivergentTheta { a: String, b: String },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: &'static str,
        got: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular")]
    Singular,

    #[error("quadratic part is not positive definite")]
    NotPositiveDefinite,

    #[error("transformed form is not diagonal: {0}")]
    NotDiagonal(String),

    #[error("not an exact covering system: {0}")]
    NotExactCover(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("expansion check failed: series differ at exponent {exponent}")]
    ExpansionMismatch { exponent: i64 },

    #[error("record {id}: {source}")]
    Record {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("corpus format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Prefixes a location without repeating the `corpus format` tag.
    pub(crate) fn with_context(self, at: impl std::fmt::Display) -> Error {
        match self {
            Error::Format(m) => Error::Format(format!("{at}: {m}")),
            other => Error::Format(format!("{at}: {other}")),
        }
    }

    pub(crate) fn in_record(self, id: &str) -> Error {
        match self {
            e @ Error::Record { .. } => e,
            other => Error::Record {
                id: id.to_string(),
                source: Box::new(other),
            },
        }
    }
}
