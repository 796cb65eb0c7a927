use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm {0:e} is too small to normalize")]
    ZeroVector(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("qubit index {index} out of range for a {qubits}-qubit state")]
    IndexOutOfRange { index: usize, qubits: usize },
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid canonical coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),
    #[error("invalid message qubit: {0}")]
    InvalidMessage(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("channel is biseparable across 1|23 (a0 = {0:e})")]
    BiseparableChannel(f64),
    #[error("channel is outside the general case: {0}")]
    DegenerateChannel(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
