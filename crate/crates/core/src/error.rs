//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coherence order {order} out of range for {qubits} qubits")]
    OrderOutOfRange { order: i32, qubits: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("{qubits} qubits exceeds the dense-mode cap of {cap}; build a truncated sector system instead")]
    Capacity { qubits: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigensolver failed: LAPACK info = {0}")]
    Eigensolver(i32),

    #[error("optimizer did not reach the requested residual: best = {residual:.3e}")]
    OptimizerResidual { residual: f64 },
}
