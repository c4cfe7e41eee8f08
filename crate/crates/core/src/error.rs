use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands that do not belong to the group, bad generator indices, and
    /// similar misuse.
    #[error("domain error: {0}")]
    Domain(String),

    /// A ball or table would exceed the configured element cap.
    #[error("resource cap exceeded: {what} needs more than {cap} elements")]
    Resource { what: String, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A boundary encoding whose crossing parity is not path independent.
    #[error("invalid boundary encoding: parity conflict on edge ({from}, {to})")]
    InvalidEncoding { from: String, to: String },

    /// A query that falls outside a finite truncation.
    #[error("out of truncation range: {0}")]
    Range(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown group constructor `{0}`")]
    UnknownConstructor(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
