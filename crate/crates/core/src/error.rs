use thiserror::Error;

/// Errors raised by parsing, validation and the decision procedures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("semantic error at {line}:{column}: {message}")]
    Semantic {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("cap exceeded: {what} is {actual}, limit is {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("span family is not dense: {0}")]
    NotDense(String),

    #[error("middle objects of the composed families differ")]
    MiddleMismatch,

    #[error("theorem violation (engine bug): {0}")]
    TheoremViolation(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn unknown(kind: &'static str, name: impl Into<String>) -> Self {
        Error::Unknown {
            kind,
            name: name.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
