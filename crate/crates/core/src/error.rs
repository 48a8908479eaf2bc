use thiserror::Error;

use crate::machine::Key;

#[derive(Debug, Error)]
pub enum Error {
    #[error("buffer capacity must be positive")]
    ZeroCapacity,

    #[error("invalid machine state: {0}")]
    InvalidState(&'static str),

    #[error("duplicate key {0} in an input that must be duplicate-free")]
    DuplicateKey(Key),

    #[error("arithmetic overflow while building a key sequence")]
    ArithmeticOverflow,

    #[error("invalid range {from}..{to} for {kind}")]
    InvalidRange {
        kind: &'static str,
        from: Key,
        to: Key,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle node budget of {budget} exhausted (best known upper bound: {best_known:?})")]
    BudgetExceeded {
        budget: u64,
        best_known: Option<usize>,
    },

    #[error("adversary protocol violation: {0}")]
    Protocol(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("records mix oracle provenances")]
    MixedProvenance,

    #[error("malformed input file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
