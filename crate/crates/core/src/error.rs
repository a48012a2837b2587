use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("agent count {n} outside supported range 1..={max}")]
    SizeLimit { n: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("dimension mismatch: expected {expected} agents, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("weighting contract violated: {0}")]
    WeightContract(String),

    #[error("invalid weight scheme: {0}")]
    InvalidScheme(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
