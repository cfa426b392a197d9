use thiserror::Error;

/// Errors produced by the learning-space toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a structural requirement (bad labels, non-permutations, wrong domain).
    #[error("validation error: {0}")]
    Validation(String),

    /// A text file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An explicit family or enumeration exceeded its configured capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A directed graph that must be acyclic (or transitively reduced) is not.
    #[error("structural error: {0}")]
    Structural(String),

    /// The given set is not a state of the space.
    #[error("not a state: {0}")]
    NotAState(String),

    /// An edit of a learning space would break the learning-space axioms.
    #[error("invalid edit: {0}")]
    InvalidEdit(String),

    /// An answer arrived for a concept other than the one asked.
    #[error("out of turn: {0}")]
    OutOfTurn(String),

    /// All likelihoods vanished.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Capacity(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
