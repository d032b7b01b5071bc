use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing table entry at {0}")]
    MissingEntry(String),
    #[error("unknown label or index: {0}")]
    Index(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("unsupported scenario: {0}")]
    Unsupported(String),
    #[error("undefined conditional: p({0}) = 0")]
    UndefinedConditional(String),
    #[error("exact-mode input required: {0}")]
    ExactnessRequired(String),
    #[error("incompatible conditioning event: {0}")]
    Incompatible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
