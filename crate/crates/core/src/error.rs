use thiserror::Error;

/// Errors produced by the valuation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A distribution or model parameter lies outside its domain.
    #[error("parameter out of domain: {name} = {value} ({reason})")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A fraction or architecture references something missing from the catalog.
    #[error("catalog error: {0}")]
    Catalog(String),

    /// One or more validation issues; all of them are reported together.
    #[error("validation failed:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    /// A sweep or CLI configuration could not be resolved.
    #[error("configuration error: {0}")]
    Config(String),

    /// The scenario file could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported transition: {0}")]
    UnsupportedTransition(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
