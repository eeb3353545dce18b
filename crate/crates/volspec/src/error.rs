use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state became non-finite at internal step {step}")]
    NonFinite { step: u64 },

    #[error("input is empty")]
    EmptyInput,

    #[error("all samples are zero or negative")]
    AllZero,

    #[error("series too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("spectra have mismatched frequency grids")]
    GridMismatch,

    #[error("fewer than {needed} points inside the fit range")]
    InsufficientPoints { needed: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code associated with this error kind.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Domain(_) => 2,
            Error::NonFinite { .. } => 3,
            Error::Io(_) => 4,
            _ => 1,
        }
    }
}
