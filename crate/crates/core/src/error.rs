use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. The CLI maps each variant onto an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An exhaustive method was asked to enumerate more than its configured cap.
    #[error("capability error: {0}")]
    Capability(String),

    #[error("numerical error at pivot {index}: {message}")]
    Numerical { index: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("rank error: requested {requested} steps but numerical rank is {rank}")]
    Rank { requested: usize, rank: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("analyticity violation: {0}")]
    Analyticity(String),

    #[error("function is numerically zero on the grid")]
    ZeroFunction,
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn numerical(index: usize, msg: impl Into<String>) -> Self {
        Error::Numerical {
            index,
            message: msg.into(),
        }
    }
}
