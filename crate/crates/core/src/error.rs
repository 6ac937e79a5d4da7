use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("elements or sets from different ambient groups")]
    GroupMismatch,
    #[error("size budget exceeded while materializing {what} (cap {cap})")]
    CapExceeded { what: String, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("vector is not primitive in the lattice (content {0})")]
    NotPrimitive(String),
    #[error("dimension {dim} exceeds the supported limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("retry limit {0} exceeded")]
    RetryLimit(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("audit failed: {0}")]
    Audit(String),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, cap: usize) -> Self {
        Error::CapExceeded { what: what.into(), cap }
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
