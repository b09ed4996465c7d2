use thiserror::Error;

use crate::bn::ValidationReport;
use crate::model_io::Diagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a structural precondition (unknown variable,
    /// mismatched cardinality, out-of-range state, malformed table).
    #[error("structural error: {0}")]
    Structural(String),

    /// The evidence has probability zero under the network.
    #[error("inconsistent evidence: P(e) = 0")]
    InconsistentEvidence,

    #[error("state space of {size} entries exceeds the cap of {cap}")]
    Capacity { size: u128, cap: u128 },

    #[error("network failed validation: {0}")]
    InvalidNetwork(ValidationReport),

    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    #[error("non-monotone question: p = {p} is below p' = {p_prime}")]
    NonMonotone { p: f64, p_prime: f64 },

    /// Operation not allowed in the current session state.
    #[error("invalid session state: {0}")]
    State(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("version conflict: record has format version {record}, current document has {current}")]
    VersionConflict { record: u32, current: u32 },

    /// A stored transcript no longer reproduces under the model.
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),

    #[error("invalid questionnaire document:\n{0}")]
    Document(Diagnostics),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<Diagnostics> for Error {
    fn from(d: Diagnostics) -> Self {
        Error::Document(d)
    }
}

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}
