use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation not available in lattice mode: {0}")]
    LatticeUnsupported(&'static str),
    #[error("{what} cap exceeded: {size} > {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no convergence after {0} sweeps")]
    NonConvergence(usize),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }

    pub(crate) fn cap(what: &'static str, size: u128, cap: u128) -> Self {
        Error::CapExceeded { what, size, cap }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
