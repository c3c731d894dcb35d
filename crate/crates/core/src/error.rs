use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("unknown {kind}: {what}")]
    Lookup { kind: &'static str, what: String },

    #[error("conflicting phases for defect at {key}: {first} vs {second}")]
    SymmetryConflict {
        key: String,
        first: f64,
        second: f64,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("photon number mismatch: input carries {input}, output carries {output}")]
    PhotonNumber { input: usize, output: usize },

    #[error("operation needs at least two walkers, state has {0}")]
    Arity(usize),

    #[error("{what} exceeds cap: {requested} > {cap}")]
    Cap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("cannot embed {modes} modes: {reason}")]
    Sizing { modes: usize, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn lookup(kind: &'static str, what: impl std::fmt::Display) -> Self {
        Error::Lookup {
            kind,
            what: what.to_string(),
        }
    }
}
