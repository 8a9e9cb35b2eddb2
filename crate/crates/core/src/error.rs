use thiserror::Error;

/// Errors raised by model construction, parsing, evaluation and the
/// composition procedures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("invalid rational `{0}`")]
    BadRational(String),

    #[error("invalid weight `{0}` for monoid {1}")]
    BadWeight(String, String),

    #[error("negative delay {0}")]
    NegativeDelay(String),

    #[error("timed words must be non-empty")]
    EmptyWord,

    #[error("unknown monoid `{0}`")]
    UnknownMonoid(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("fragment violation: {0}")]
    Fragment(String),

    #[error("unsound composition: {0}")]
    UnsoundComposition(String),

    #[error("preimage count {count} exceeds cap {cap}")]
    PreimageCap { count: u128, cap: u128 },

    #[error("{0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
