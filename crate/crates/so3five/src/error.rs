//! Error type shared by every module.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by parsing, validation and the geometric pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed scalar literal; `pos` is a byte offset into the literal.
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// Schema violation in a JSON document; `pointer` is a JSON pointer.
    #[error("schema error at {pointer}: {msg}")]
    Schema { pointer: String, msg: String },
    /// An argument outside the operation's domain.
    #[error("argument error: {0}")]
    Argument(String),
    /// Shapes or degrees that do not fit together.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A linear system without a unique solution.
    #[error("singular system: {0}")]
    Singular(String),
    /// Input data violating a structural condition (Jacobi, horizontality,
    /// nearly integrability, the conditions on Υ).
    #[error("structure error: {0}")]
    Structure(String),
    /// A float computation that lost too much accuracy.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// File or stream failure.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn schema(pointer: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}
