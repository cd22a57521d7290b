//! Dense complex linear algebra for desk-scale matrices (N up to a few hundred).
//!
//! All tolerances are relative to the Frobenius norm of the input so results
//! are invariant under rescaling of the matrix.

mod eigen;
mod expm;
mod hermitian;
mod lu;
mod matrix;
mod svd;

use thiserror::Error;

pub use eigen::{eig, eigenvalues, schur, EigenSystem, Schur};
pub use expm::{expm, expm_scaled, EXPM_MAX_NORM};
pub use hermitian::{hermitian_eigen, HermitianEigen};
pub use lu::{inverse, solve, Lu};
pub use matrix::{vec_dot, vec_norm, ComplexMatrix, C64};
pub use svd::{condition_number, singular_values, singular_values_of_columns};

/// Default relative tolerance for eigen-residuals.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("{len} entries cannot fill a {rows}x{rows} matrix")]
    NotSquare { rows: usize, len: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("eigen-solver residual {residual:e} exceeds tolerance {tol:e}")]
    ConvergenceFailure { residual: f64, tol: f64 },
    #[error("1-norm {norm:e} exceeds the safe exponentiation range {limit:e}")]
    OverflowRisk { norm: f64, limit: f64 },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },
}

impl LinalgError {
    /// Stable variant name, used for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            LinalgError::Empty => "EmptyMatrix",
            LinalgError::NotSquare { .. } | LinalgError::RaggedRow { .. } => "DimensionError",
            LinalgError::NonFinite { .. } => "NonFinite",
            LinalgError::DimensionMismatch { .. } => "DimensionMismatch",
            LinalgError::InvalidTolerance(_) => "InvalidTolerance",
            LinalgError::ConvergenceFailure { .. } => "ConvergenceFailure",
            LinalgError::OverflowRisk { .. } => "OverflowRisk",
            LinalgError::Singular => "Singular",
            LinalgError::NotHermitian { .. } => "NotHermitian",
        }
    }
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}
