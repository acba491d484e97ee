use thiserror::Error;

/// Errors surfaced by the library. Variants mirror the failure classes of
/// the public operations: malformed construction input, domain violations
/// (preconditions on cycles, dimensions, colorings), membership/containment
/// violations, resource caps, and numeric trouble in float paths.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("membership error: {0}")]
    Membership(String),
    #[error("containment error: {0}")]
    Containment(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
