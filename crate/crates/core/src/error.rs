use thiserror::Error;

/// Errors raised while building or reading a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("invalid object name {name:?}: {reason}")]
    InvalidName { name: String, reason: &'static str },
    #[error("invalid attribute {name:?}: {reason}")]
    InvalidAttribute { name: String, reason: String },
    #[error("invalid relation label {0:?}: expected [a-z][a-z0-9-]*")]
    InvalidLabel(String),
    #[error("object \"{0}\" is already defined")]
    DuplicateObject(String),
    #[error("attribute \"{0}\" is defined twice at the same level")]
    DuplicateAttribute(String),
    #[error("unknown object \"{0}\"")]
    UnknownObject(String),
    #[error("relation source \"{0}\" does not exist")]
    UnknownSource(String),
}
