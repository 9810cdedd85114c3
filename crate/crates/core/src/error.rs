use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negation is only allowed directly above an atom (byte {pos})")]
    NegationBelowNonAtom { pos: usize },
    #[error("formula is in fragment {found}, expected {expected}")]
    WrongFragment { expected: String, found: String },
    #[error("invalid transition system: {0}")]
    InvalidLts(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("broken witness: {0}")]
    BrokenConnector(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{states} states exceed the brute-force limit of {limit}")]
    SizeGuard { states: usize, limit: usize },
    #[error("state set is not a bottom strongly connected component")]
    NotBscc,
    #[error("witness failed re-verification: {0}")]
    InternalWitnessInvalid(String),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code used in CLI error documents and FFI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::NegationBelowNonAtom { .. } => "negation-below-non-atom",
            Error::WrongFragment { .. } => "wrong-fragment",
            Error::InvalidLts(_) => "invalid-lts",
            Error::UnknownState(_) => "unknown-state",
            Error::InvalidLasso(_) => "invalid-lasso",
            Error::InvalidPath(_) => "invalid-path",
            Error::BrokenConnector(_) => "broken-connector",
            Error::Unsupported(_) => "unsupported",
            Error::SizeGuard { .. } => "size-guard",
            Error::NotBscc => "not-bscc",
            Error::InternalWitnessInvalid(_) => "internal-witness-invalid",
            Error::Json(_) => "malformed-document",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
        }
    }
}
