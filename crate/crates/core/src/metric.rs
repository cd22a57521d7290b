//! Metric operators for unbroken-phase pseudo-Hermitian Hamiltonians.
//!
//! With right eigenvectors `ψ_n` (unit norm) and left eigenvectors `φ_n`
//! normalized so that `⟨φ_m|ψ_n⟩ = δ_mn`, every sign vector `s` gives a
//! Hermitian solution of `ηH = H†η`:
//!
//! ```text
//! η = Σ_n s_n |φ_n⟩⟨φ_n|
//! ```
//!
//! All-positive signs give a positive-definite metric; other choices give
//! indefinite forms in which `ψ_n` has pseudo-norm of sign `s_n`.
//! Sign `k` refers to the `k`-th eigenvalue in spectral order (descending).

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{
    condition_number, eig, hermitian_eigen, ComplexMatrix, LinalgError, C64, DEFAULT_TOL,
};
use crate::pt_algebra::{toy_hamiltonian, ToyParams};
use crate::spectral::{classify, ClassifyTolerances, Phase, SpectralError};

/// Intertwining tolerance used when callers do not supply one.
pub const DEFAULT_METRIC_TOL: f64 = 1e-10;

/// Eigenvector condition numbers above this flag the metric as untrustworthy.
pub const NEAR_DEFECTIVE_CEILING: f64 = 1e8;

/// Hermiticity tolerance for metrics handed to [`verify_hermitization`].
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("expected {expected} quasi-parity signs of ±1, got {got:?}")]
    InvalidSigns { expected: usize, got: Vec<i8> },
    #[error("spectrum is not all-real (phase {phase})")]
    BrokenPhase { phase: Phase },
    #[error("eigenvector condition number {eigvec_cond:e} exceeds {ceiling:e}")]
    NearDefective {
        eigvec_cond: f64,
        ceiling: f64,
        /// The metric, when one could still be assembled.
        metric: Option<Box<MetricOperator>>,
    },
    #[error("intertwining residual {residual:e} exceeds tolerance {tol:e}")]
    IntertwiningFailed { residual: f64, tol: f64 },
    #[error("metric is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl MetricError {
    pub fn name(&self) -> &'static str {
        match self {
            MetricError::InvalidSigns { .. } => "InvalidSigns",
            MetricError::BrokenPhase { .. } => "BrokenPhase",
            MetricError::NearDefective { .. } => "NearDefective",
            MetricError::IntertwiningFailed { .. } => "IntertwiningFailed",
            MetricError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            MetricError::DimensionMismatch { .. } => "DimensionMismatch",
            MetricError::Spectral(e) => e.name(),
            MetricError::Linalg(e) => e.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricOperator {
    pub eta: ComplexMatrix,
    pub signs: Vec<i8>,
    /// `||ηH - H†η||_F / (||η||_F ||H||_F)`
    pub intertwining_residual: f64,
    pub min_eigenvalue: f64,
    /// Condition number of `η`.
    pub cond: f64,
    /// Condition number of the right eigenvector matrix of `H`.
    pub eigvec_cond: f64,
}

impl MetricOperator {
    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue > 0.0
    }
}

fn intertwining_residual(h: &ComplexMatrix, eta: &ComplexMatrix) -> f64 {
    let lhs = eta * h;
    let rhs = &h.adjoint() * eta;
    let denom = eta.frobenius_norm() * h.frobenius_norm();
    if denom == 0.0 {
        0.0
    } else {
        (&lhs - &rhs).frobenius_norm() / denom
    }
}

pub fn build_metric(
    h: &ComplexMatrix,
    signs: &[i8],
    tol: f64,
) -> Result<MetricOperator, MetricError> {
    build_metric_with_ceiling(h, signs, tol, NEAR_DEFECTIVE_CEILING)
}

pub fn build_metric_with_ceiling(
    h: &ComplexMatrix,
    signs: &[i8],
    tol: f64,
    ceiling: f64,
) -> Result<MetricOperator, MetricError> {
    let n = h.dim();
    if signs.len() != n || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(MetricError::InvalidSigns {
            expected: n,
            got: signs.to_vec(),
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LinalgError::InvalidTolerance(tol).into());
    }
    let report = classify(h, &ClassifyTolerances::default())?;
    match report.phase {
        Phase::AllReal => {}
        Phase::ConjugatePairs => {
            return Err(MetricError::BrokenPhase {
                phase: report.phase,
            })
        }
        Phase::Exceptional => {
            return Err(MetricError::NearDefective {
                eigvec_cond: f64::INFINITY,
                ceiling,
                metric: None,
            })
        }
    }
    let sys = eig(h, DEFAULT_TOL)?;
    let eigvec_cond = sys.eigenvector_condition();
    if !sys.biorthogonal {
        return Err(MetricError::NearDefective {
            eigvec_cond,
            ceiling,
            metric: None,
        });
    }

    let mut eta = ComplexMatrix::zeros(n);
    for (row, &s) in sys.left.iter().zip(signs) {
        let s = f64::from(s);
        for i in 0..n {
            let ci = row[i].conj() * s;
            for j in 0..n {
                eta[(i, j)] += ci * row[j];
            }
        }
    }
    let eta = eta.hermitian_part();
    let intertwining_residual = intertwining_residual(h, &eta);
    let min_eigenvalue = hermitian_eigen(&eta, HERMITIAN_TOL)?.values[0];
    let metric = MetricOperator {
        cond: condition_number(&eta),
        eta,
        signs: signs.to_vec(),
        intertwining_residual,
        min_eigenvalue,
        eigvec_cond,
    };
    if eigvec_cond > ceiling {
        return Err(MetricError::NearDefective {
            eigvec_cond,
            ceiling,
            metric: Some(Box::new(metric)),
        });
    }
    if intertwining_residual > tol {
        return Err(MetricError::IntertwiningFailed {
            residual: intertwining_residual,
            tol,
        });
    }
    Ok(metric)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub b: f64,
    pub cond: f64,
    pub min_eig: f64,
    pub residual: f64,
    /// Set when the eigenvector basis is beyond [`NEAR_DEFECTIVE_CEILING`].
    pub near_defective: bool,
}

/// Condition number of the positive metric of the PT toy model along `b_values`.
///
/// Points past the near-defective ceiling are kept and flagged; points where
/// no metric can be assembled abort the profile with the underlying error.
pub fn metric_singularity_profile(
    a: f64,
    b_values: &[f64],
) -> Result<Vec<ProfilePoint>, MetricError> {
    b_values
        .par_iter()
        .map(|&b| {
            let params = ToyParams::pt(a, b).map_err(|_| SpectralError::NonFinite)?;
            let h = toy_hamiltonian(&params);
            let (metric, near_defective) = match build_metric(&h, &[1, 1], DEFAULT_METRIC_TOL) {
                Ok(m) => (m, false),
                Err(MetricError::NearDefective {
                    metric: Some(m), ..
                }) => (*m, true),
                Err(e) => return Err(e),
            };
            Ok(ProfilePoint {
                b,
                cond: metric.cond,
                min_eig: metric.min_eigenvalue,
                residual: metric.intertwining_residual,
                near_defective,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitizationReport {
    pub intertwining_residual: f64,
    /// `||h - h†|| / ||h||` for `h = η^{1/2} H η^{-1/2}`; `None` when `η` is indefinite.
    pub similarity_residual: Option<f64>,
}

/// `η^{1/2} H η^{-1/2}`, Hermitian whenever `η` is a positive metric for `H`.
pub fn hermitian_partner(
    h: &ComplexMatrix,
    eta: &ComplexMatrix,
) -> Result<ComplexMatrix, MetricError> {
    if h.dim() != eta.dim() {
        return Err(MetricError::DimensionMismatch {
            left: h.dim(),
            right: eta.dim(),
        });
    }
    let eig = hermitian_eigen(eta, HERMITIAN_TOL)?;
    let min_eigenvalue = eig.values[0];
    if min_eigenvalue <= 0.0 {
        return Err(MetricError::NotPositiveDefinite { min_eigenvalue });
    }
    let root = eig.apply_function(f64::sqrt);
    let inv_root = eig.apply_function(|w| 1.0 / w.sqrt());
    Ok(&(&root * h) * &inv_root)
}

pub fn verify_hermitization(
    h: &ComplexMatrix,
    eta: &ComplexMatrix,
) -> Result<HermitizationReport, MetricError> {
    if h.dim() != eta.dim() {
        return Err(MetricError::DimensionMismatch {
            left: h.dim(),
            right: eta.dim(),
        });
    }
    let intertwining = intertwining_residual(h, eta);
    let similarity_residual = match hermitian_partner(h, eta) {
        Ok(partner) => {
            let norm = partner.frobenius_norm();
            Some(if norm > 0.0 {
                partner.hermiticity_defect() / norm
            } else {
                0.0
            })
        }
        Err(MetricError::NotPositiveDefinite { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(HermitizationReport {
        intertwining_residual: intertwining,
        similarity_residual,
    })
}

/// `⟨x|η|x⟩` for a metric, real up to rounding.
pub fn metric_norm(eta: &ComplexMatrix, x: &[C64]) -> f64 {
    let ex = eta.matvec(x);
    x.iter().zip(&ex).map(|(a, b)| a.conj() * b).sum::<C64>().re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(a: f64, b: f64) -> ComplexMatrix {
        toy_hamiltonian(&ToyParams::pt(a, b).unwrap())
    }

    #[test]
    fn hermitian_input_gives_identity() {
        let h = toy_hamiltonian(&ToyParams::hermitian(1.0, 0.7).unwrap());
        let m = build_metric(&h, &[1, 1], 1e-10).unwrap();
        assert!((&m.eta - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
        assert!((m.cond - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbroken_toy_positive_metric() {
        let h = toy(1.0, 0.5);
        let m = build_metric(&h, &[1, 1], 1e-10).unwrap();
        assert!(m.min_eigenvalue > 0.0);
        assert!(m.intertwining_residual <= 1e-10);
        assert!(m.eta.hermiticity_defect() <= 1e-12);
    }

    #[test]
    fn mixed_signs_give_scaled_parity() {
        let h = toy(1.0, 0.5);
        let m = build_metric(&h, &[1, -1], 1e-10).unwrap();
        let s = 0.75f64.sqrt();
        let expected = ComplexMatrix::from_real_diag(&[1.0 / s, -1.0 / s]).unwrap();
        assert!((&m.eta - &expected).max_abs() < 1e-13, "{:?}", m.eta);
        assert!(m.min_eigenvalue < 0.0);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            build_metric(&toy(1.0, 2.0), &[1, 1], 1e-10),
            Err(MetricError::BrokenPhase { .. })
        ));
        assert!(matches!(
            build_metric(&toy(1.0, 1.0), &[1, 1], 1e-10),
            Err(MetricError::NearDefective { .. })
        ));
        assert!(matches!(
            build_metric(&toy(1.0, 0.5), &[1], 1e-10),
            Err(MetricError::InvalidSigns { .. })
        ));
        assert!(matches!(
            build_metric(&toy(1.0, 0.5), &[1, 0], 1e-10),
            Err(MetricError::InvalidSigns { .. })
        ));
    }

    #[test]
    fn profile_rest_point_and_ep() {
        let p = metric_singularity_profile(1.0, &[0.0]).unwrap();
        assert!((p[0].cond - 1.0).abs() < 1e-12);
        let err = metric_singularity_profile(1.0, &[0.5, 1.0]).unwrap_err();
        assert!(matches!(
            err,
            MetricError::NearDefective { .. } | MetricError::BrokenPhase { .. }
        ));
    }

    #[test]
    fn hermitization_checks() {
        let h = toy(1.0, 0.5);
        let m = build_metric(&h, &[1, 1], 1e-10).unwrap();
        let r = verify_hermitization(&h, &m.eta).unwrap();
        assert!(r.intertwining_residual <= 1e-9);
        assert!(r.similarity_residual.unwrap() <= 1e-9);

        let herm = toy_hamiltonian(&ToyParams::hermitian(2.0, -1.0).unwrap());
        let r = verify_hermitization(&herm, &ComplexMatrix::identity(2)).unwrap();
        assert!(r.intertwining_residual < 1e-15);
        assert!(r.similarity_residual.unwrap() < 1e-15);

        let indefinite = build_metric(&h, &[1, -1], 1e-10).unwrap();
        let r = verify_hermitization(&h, &indefinite.eta).unwrap();
        assert!(r.similarity_residual.is_none());
        assert!(matches!(
            hermitian_partner(&h, &indefinite.eta),
            Err(MetricError::NotPositiveDefinite { .. })
        ));
    }
}
