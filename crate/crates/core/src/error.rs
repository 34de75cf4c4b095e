use thiserror::Error;

/// Errors raised by the workbench.
///
/// `Input` covers malformed arguments (unknown ids, arity mismatches, out of
/// universe elements). `Integrity` is reserved for violated internal
/// invariants such as a class that claims smooth intersections but does not
/// have them on the structure at hand.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
