use thiserror::Error;

use crate::planar::NonPlanarWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource cap exceeded: {what} needs {requested}, cap is {cap}")]
    ResourceCap {
        what: String,
        requested: u128,
        cap: u128,
    },

    #[error("graph is not planar (contains a subdivision of {})", .0.kind)]
    NonPlanar(Box<NonPlanarWitness>),

    #[error("round {round} out of range (trace has {available} rounds)")]
    RoundOutOfRange { round: usize, available: usize },

    #[error("colouring not yet stable after {rounds} rounds")]
    NotStable { rounds: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
