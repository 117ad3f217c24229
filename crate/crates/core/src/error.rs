use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DfsError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("qubit-count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("{n_qubits} qubits exceeds the dense limit of {limit}")]
    DenseLimit { n_qubits: usize, limit: usize },

    #[error("subgroup order exceeds the configured cap of {cap}")]
    OrderCap { cap: usize },

    #[error("subgroup is non-Abelian, so it has no character decomposition")]
    NonAbelian,

    #[error("character does not belong to this subgroup")]
    ForeignCharacter,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate Kraus draw: min eigenvalue of sum A^dag A is {min_eigenvalue:e}")]
    DegenerateKraus { min_eigenvalue: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, DfsError>;

impl From<serde_json::Error> for DfsError {
    fn from(err: serde_json::Error) -> Self {
        DfsError::Serde(err.to_string())
    }
}
