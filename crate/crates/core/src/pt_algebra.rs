//! Involutions, pseudo-Hermiticity and indefinite inner products.
//!
//! PT symmetry is represented by pseudo-Hermiticity with respect to a
//! Hermitian involution `P`: `H = P H† P`. The two-level models
//!
//! ```text
//! H+ = [[a, b], [ b, -a]]   (Hermitian)
//! H- = [[a, b], [-b, -a]]   (σ3-pseudo-Hermitian)
//! ```
//!
//! are the reference inputs for the rest of the crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{vec_norm, ComplexMatrix, LinalgError, C64};

/// Tolerance on `P - P†` and `P² - I` (Frobenius, per unit dimension).
pub const INVOLUTION_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PtError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(
        "not a Hermitian involution (Hermiticity residual {hermitian:e}, P²-I residual {square:e})"
    )]
    NotAnInvolution { hermitian: f64, square: f64 },
    #[error("toy parameters must be finite (a = {a}, b = {b})")]
    NonFiniteParams { a: f64, b: f64 },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl PtError {
    pub fn name(&self) -> &'static str {
        match self {
            PtError::DimensionMismatch { .. } => "DimensionMismatch",
            PtError::NotAnInvolution { .. } => "NotAnInvolution",
            PtError::NonFiniteParams { .. } => "InvalidParameters",
            PtError::ZeroDimension => "InvalidParameters",
            PtError::Linalg(e) => e.name(),
        }
    }
}

/// A Hermitian matrix squaring to the identity: the "parity" of the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Involution {
    matrix: ComplexMatrix,
}

impl Involution {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, PtError> {
        let n = matrix.dim();
        let tol = INVOLUTION_TOL * n as f64;
        let hermitian = matrix.hermiticity_defect();
        let square = (&(&matrix * &matrix) - &ComplexMatrix::identity(n)).frobenius_norm();
        if hermitian > tol || square > tol {
            return Err(PtError::NotAnInvolution { hermitian, square });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// `diag(signs)`; every entry must be `±1`.
    pub fn diagonal(signs: &[f64]) -> Result<Self, PtError> {
        if signs.is_empty() {
            return Err(PtError::ZeroDimension);
        }
        Self::new(ComplexMatrix::from_real_diag(signs)?)
    }

    /// Third Pauli matrix `σ3 = diag(1, -1)`.
    pub fn sigma3() -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diag(&[1.0, -1.0]).expect("finite"),
        }
    }

    /// `diag(1, -1, 1, -1, ...)`
    pub fn alternating(dim: usize) -> Result<Self, PtError> {
        let signs: Vec<f64> = (0..dim)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        Self::diagonal(&signs)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `P M P`
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.matrix * m) * &self.matrix
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToyVariant {
    /// `[[a, b], [b, -a]]`
    HermitianPlus,
    /// `[[a, b], [-b, -a]]`
    PtMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyParams {
    pub a: f64,
    pub b: f64,
    pub variant: ToyVariant,
}

impl ToyParams {
    pub fn new(a: f64, b: f64, variant: ToyVariant) -> Result<Self, PtError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(PtError::NonFiniteParams { a, b });
        }
        Ok(Self { a, b, variant })
    }

    pub fn pt(a: f64, b: f64) -> Result<Self, PtError> {
        Self::new(a, b, ToyVariant::PtMinus)
    }

    pub fn hermitian(a: f64, b: f64) -> Result<Self, PtError> {
        Self::new(a, b, ToyVariant::HermitianPlus)
    }
}

pub fn toy_hamiltonian(p: &ToyParams) -> ComplexMatrix {
    let lower = match p.variant {
        ToyVariant::HermitianPlus => p.b,
        ToyVariant::PtMinus => -p.b,
    };
    ComplexMatrix::from_real_rows(&[[p.a, p.b], [lower, -p.a]])
        .expect("toy parameters are validated finite")
}

/// Outcome of a pseudo-Hermiticity test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoHermiticity {
    pub holds: bool,
    /// `||H - P H† P||_F / ||H||_F` (zero for the zero matrix).
    pub residual: f64,
}

pub fn is_pseudo_hermitian(
    h: &ComplexMatrix,
    p: &Involution,
    tol: f64,
) -> Result<PseudoHermiticity, PtError> {
    check_dims(h.dim(), p.dim())?;
    let diff = (h - &p.conjugate(&h.adjoint())).frobenius_norm();
    let norm = h.frobenius_norm();
    let residual = if norm > 0.0 { diff / norm } else { 0.0 };
    Ok(PseudoHermiticity {
        holds: diff <= tol * norm,
        residual,
    })
}

/// `⟨x|P|y⟩`, conjugate-linear in `x`.
pub fn pseudo_inner(p: &Involution, x: &[C64], y: &[C64]) -> Result<C64, PtError> {
    check_dims(x.len(), p.dim())?;
    check_dims(y.len(), p.dim())?;
    let py = p.matrix().matvec(y);
    Ok(x.iter().zip(&py).map(|(a, b)| a.conj() * b).sum())
}

/// `⟨x|P|x⟩`, real for Hermitian `P`; may be negative or zero.
pub fn pseudo_norm(p: &Involution, x: &[C64]) -> Result<f64, PtError> {
    Ok(pseudo_inner(p, x, x)?.re)
}

/// Sesquilinear form `⟨x|G|y⟩` for an arbitrary (typically Hermitian) `G`.
pub fn form_inner(g: &ComplexMatrix, x: &[C64], y: &[C64]) -> Result<C64, PtError> {
    check_dims(x.len(), g.dim())?;
    check_dims(y.len(), g.dim())?;
    let gy = g.matvec(y);
    Ok(x.iter().zip(&gy).map(|(a, b)| a.conj() * b).sum())
}

fn check_dims(left: usize, right: usize) -> Result<(), PtError> {
    if left != right {
        Err(PtError::DimensionMismatch { left, right })
    } else {
        Ok(())
    }
}

fn random_entries(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n * n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Seeded complex matrix with entries uniform in the unit square.
pub fn random_matrix(n: usize, seed: u64) -> Result<ComplexMatrix, PtError> {
    if n == 0 {
        return Err(PtError::ZeroDimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ComplexMatrix::new(n, random_entries(&mut rng, n))?)
}

/// `H = B + P B† P` for a seeded random `B`; always P-pseudo-Hermitian.
pub fn random_pseudo_hermitian(
    n: usize,
    p: &Involution,
    seed: u64,
) -> Result<ComplexMatrix, PtError> {
    check_dims(n, p.dim())?;
    let b = random_matrix(n, seed)?;
    Ok(&b + &p.conjugate(&b.adjoint()))
}

/// Seeded unit vector with uniform complex entries.
pub fn random_state(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nrm = vec_norm(&v);
    v.into_iter().map(|z| z / nrm).collect()
}
