use thiserror::Error;

/// Errors produced by the scrambler toolkit.
#[derive(Debug, Error)]
pub enum HackError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error(
        "dimension limit exceeded: {what} needs {required} elements, limit is {limit} (set HACK_MAX_DIM to raise it)"
    )]
    DimensionLimit { what: String, required: u128, limit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HackError>;
