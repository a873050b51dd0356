use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Cartan type: {0}")]
    InvalidType(String),
    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("weight {0} is not in the weight lattice")]
    NotInLattice(String),
    #[error("weight has {got} coordinates, expected {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("negative diagram label {0}")]
    NegativeLabel(i64),
    #[error("{0} is not a negative root")]
    NotARoot(String),
    #[error("invalid root-space edit: {0}")]
    BadEdit(String),
    #[error("subspace is not contained in the larger subspace: {0}")]
    NotSubset(String),
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("character budget exceeded: {0}")]
    Budget(String),
    #[error("precondition `{name}` failed: {detail}")]
    Precondition { name: &'static str, detail: String },
    #[error("script error at line {line}: {msg}")]
    Script { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }

    pub(crate) fn pre(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition { name, detail: detail.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
