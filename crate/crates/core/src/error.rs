use thiserror::Error;

use crate::report::AxiomReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Malformed(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("axiom check failed: {}", .0.summary())]
    AxiomViolation(Box<AxiomReport>),
    #[error("{path}: {source}")]
    Document {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
