//! Spectral regimes of pseudo-Hermitian matrices.
//!
//! A spectrum is classified as
//! * `AllReal`: every eigenvalue real (unbroken phase),
//! * `ConjugatePairs`: non-real eigenvalues present, matched into conjugate pairs,
//! * `Exceptional`: eigenvalues and eigenvectors coalesce (Jordan block).
//!
//! `Exceptional` is tested first: near a coalescence the eigenvalues may look
//! real or complex depending on rounding, but the eigenvector basis collapses
//! either way.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    eig, eigenvalues, singular_values_of_columns, vec_dot, vec_norm, ComplexMatrix, LinalgError,
    C64, DEFAULT_TOL,
};
use crate::pt_algebra::{toy_hamiltonian, ToyParams, ToyVariant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no regime change between b = {b_lo} and b = {b_hi}")]
    NoBracket { b_lo: f64, b_hi: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("parameters must be finite")]
    NonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl SpectralError {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralError::InvalidGrid(_) => "InvalidGrid",
            SpectralError::NoBracket { .. } => "NoBracket",
            SpectralError::InvalidTolerance(_) => "InvalidTolerance",
            SpectralError::NonFinite => "InvalidParameters",
            SpectralError::Linalg(e) => e.name(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    AllReal,
    ConjugatePairs,
    Exceptional,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::AllReal => "AllReal",
            Phase::ConjugatePairs => "ConjugatePairs",
            Phase::Exceptional => "Exceptional",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyTolerances {
    /// `|Im λ| <= imag * spectral radius` counts as real.
    pub imag: f64,
    /// Conjugate partners must agree to `pair * spectral radius`.
    pub pair: f64,
    /// Eigenvectors closer than this angle (radians) count as coalesced.
    pub defect_angle: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        Self {
            imag: 1e-9,
            pair: 1e-9,
            defect_angle: 1e-6,
        }
    }
}

impl ClassifyTolerances {
    fn validate(&self) -> Result<(), SpectralError> {
        for t in [self.imag, self.pair, self.defect_angle] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(SpectralError::InvalidTolerance(t));
            }
        }
        Ok(())
    }
}

/// One cluster of (numerically) repeated eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectEntry {
    /// Cluster mean.
    pub eigenvalue: C64,
    pub geometric: usize,
    pub algebraic: usize,
}

impl DefectEntry {
    pub fn is_defective(&self) -> bool {
        self.geometric < self.algebraic
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    pub phase: Phase,
    /// Index pairs `(i, j)` with `Im λ_i > 0` and `λ_j ≈ conj(λ_i)`.
    pub pairing: Vec<(usize, usize)>,
    /// Non-real eigenvalues without a conjugate partner (empty for pseudo-Hermitian input).
    pub unpaired: Vec<usize>,
    /// Every cluster with algebraic multiplicity above one.
    pub defect: Vec<DefectEntry>,
    /// Smallest angle in `[0, π/2]` between two right eigenvectors.
    pub min_vector_angle: f64,
    /// Set when the eigen-solver failed and the phase was downgraded.
    pub diagnostic: Option<String>,
}

/// Angle between the complex lines spanned by two unit vectors.
fn line_angle(u: &[C64], v: &[C64]) -> f64 {
    let d = vec_dot(u, v);
    let perp: Vec<C64> = v.iter().zip(u).map(|(vi, ui)| vi - d * ui).collect();
    vec_norm(&perp).atan2(d.norm())
}

fn eigen_clusters(values: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut group: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (gi, gj) = (group[i], group[j]);
                if gi != gj {
                    let (keep, drop) = (gi.min(gj), gi.max(gj));
                    for g in group.iter_mut() {
                        if *g == drop {
                            *g = keep;
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| group[i] == root).collect();
        if !members.is_empty() {
            out.push(members);
        }
    }
    out
}

fn pair_conjugates(
    values: &[C64],
    real_cut: f64,
    pair_tol: f64,
) -> (Vec<(usize, usize)>, Vec<usize>) {
    let upper: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].im > real_cut)
        .collect();
    let lower: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].im < -real_cut)
        .collect();
    let mut used = vec![false; lower.len()];
    let mut pairs = Vec::new();
    let mut unpaired = Vec::new();
    for &u in &upper {
        let target = values[u].conj();
        let best = lower
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &l)| (k, (values[l] - target).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((k, dist)) if dist <= pair_tol => {
                used[k] = true;
                pairs.push((u, lower[k]));
            }
            _ => unpaired.push(u),
        }
    }
    unpaired.extend(
        lower
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(_, &l)| l),
    );
    unpaired.sort_unstable();
    (pairs, unpaired)
}

pub fn classify(
    h: &ComplexMatrix,
    tols: &ClassifyTolerances,
) -> Result<SpectrumReport, SpectralError> {
    tols.validate()?;
    let norm = h.frobenius_norm();
    let (values, vectors, diagnostic) = match eig(h, DEFAULT_TOL) {
        Ok(sys) => (sys.eigenvalues, Some(sys.right), None),
        Err(e @ LinalgError::ConvergenceFailure { .. }) => (
            eigenvalues(h)?,
            None,
            Some(format!("ConvergenceFailure: {e}")),
        ),
        Err(e) => return Err(e.into()),
    };

    let radius = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = if radius > 0.0 {
        radius
    } else if norm > 0.0 {
        norm
    } else {
        1.0
    };
    let cluster_radius = tols.defect_angle * if norm > 0.0 { norm } else { 1.0 };

    let mut min_vector_angle = std::f64::consts::FRAC_PI_2;
    let mut defect = Vec::new();
    if let Some(vectors) = &vectors {
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                min_vector_angle = min_vector_angle.min(line_angle(&vectors[i], &vectors[j]));
            }
        }
        for members in eigen_clusters(&values, cluster_radius) {
            if members.len() < 2 {
                continue;
            }
            let cols: Vec<Vec<C64>> = members.iter().map(|&i| vectors[i].clone()).collect();
            let sv = singular_values_of_columns(cols);
            let geometric = sv
                .iter()
                .filter(|&&s| s > tols.defect_angle * FRAC_1_SQRT_2)
                .count()
                .max(1);
            let mean = members.iter().map(|&i| values[i]).sum::<C64>() / members.len() as f64;
            defect.push(DefectEntry {
                eigenvalue: mean,
                geometric,
                algebraic: members.len(),
            });
        }
    } else {
        min_vector_angle = 0.0;
    }

    let (pairing, unpaired) = pair_conjugates(&values, tols.imag * scale, tols.pair * scale);
    let has_complex = !pairing.is_empty() || !unpaired.is_empty();
    let phase = if diagnostic.is_some() || defect.iter().any(DefectEntry::is_defective) {
        Phase::Exceptional
    } else if has_complex {
        Phase::ConjugatePairs
    } else {
        Phase::AllReal
    };
    Ok(SpectrumReport {
        eigenvalues: values,
        phase,
        pairing,
        unpaired,
        defect,
        min_vector_angle,
        diagnostic,
    })
}

/// Closed-form toy energies `(E_1, E_2) = (-√(a² ± b²), +√(a² ± b²))`.
///
/// For a negative radicand `E_2` lies in the upper half-plane and `E_1 = conj(E_2)`.
pub fn toy_energies(p: &ToyParams) -> (C64, C64) {
    let radicand = match p.variant {
        ToyVariant::HermitianPlus => p.a * p.a + p.b * p.b,
        ToyVariant::PtMinus => p.a * p.a - p.b * p.b,
    };
    let root = if radicand >= 0.0 {
        C64::new(radicand.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-radicand).sqrt())
    };
    if radicand >= 0.0 {
        (-root, root)
    } else {
        (root.conj(), root)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub a: f64,
    pub b: f64,
    pub phase: Phase,
    /// Numerical eigenvalues in spectral order.
    pub eigenvalues: [C64; 2],
    /// `a² - b²`
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub index_before: usize,
    pub index_after: usize,
    pub b_before: f64,
    pub b_after: f64,
    pub from: Phase,
    pub to: Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub points: Vec<PhasePoint>,
    /// Neighbouring grid points whose phases differ.
    pub transitions: Vec<Transition>,
}

fn validate_grid(grid: &[f64]) -> Result<(), SpectralError> {
    if grid.is_empty() {
        return Err(SpectralError::InvalidGrid("grid is empty".into()));
    }
    if grid.iter().any(|b| !b.is_finite()) {
        return Err(SpectralError::InvalidGrid(
            "grid contains non-finite values".into(),
        ));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(SpectralError::InvalidGrid(
            "grid must be strictly monotone".into(),
        ));
    }
    Ok(())
}

/// Classifies the PT toy model at fixed `a` along `b_grid`.
pub fn sweep(a: f64, b_grid: &[f64], tols: &ClassifyTolerances) -> Result<Sweep, SpectralError> {
    if !a.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    validate_grid(b_grid)?;
    let points = b_grid
        .par_iter()
        .map(|&b| {
            let params = ToyParams::pt(a, b).map_err(|_| SpectralError::NonFinite)?;
            let report = classify(&toy_hamiltonian(&params), tols)?;
            Ok(PhasePoint {
                a,
                b,
                phase: report.phase,
                eigenvalues: [report.eigenvalues[0], report.eigenvalues[1]],
                gap: a * a - b * b,
            })
        })
        .collect::<Result<Vec<_>, SpectralError>>()?;
    let transitions = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].phase != w[1].phase)
        .map(|(i, w)| Transition {
            index_before: i,
            index_after: i + 1,
            b_before: w[0].b,
            b_after: w[1].b,
            from: w[0].phase,
            to: w[1].phase,
        })
        .collect();
    Ok(Sweep {
        points,
        transitions,
    })
}

/// `(tr/2)² - det` of a 2×2 matrix; for the PT toy model this is `a² - b²`.
fn discriminant(m: &ComplexMatrix) -> f64 {
    let half = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    (half * half + m[(0, 1)] * m[(1, 0)]).re
}

/// Bisects the discriminant sign of the PT toy model between `b_lo` and `b_hi`.
///
/// Returns `b*` within `tol_b` of the exceptional point `|a|`. An endpoint with
/// an exactly vanishing discriminant is returned as is.
pub fn locate_exceptional(a: f64, b_lo: f64, b_hi: f64, tol_b: f64) -> Result<f64, SpectralError> {
    if !(tol_b > 0.0 && tol_b.is_finite()) {
        return Err(SpectralError::InvalidTolerance(tol_b));
    }
    if !(a.is_finite() && b_lo.is_finite() && b_hi.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let disc = |b: f64| -> f64 {
        discriminant(&toy_hamiltonian(
            &ToyParams::pt(a, b).expect("finite parameters"),
        ))
    };
    let (mut lo, mut hi) = (b_lo.min(b_hi), b_lo.max(b_hi));
    let (d_lo, d_hi) = (disc(lo), disc(hi));
    if d_lo == 0.0 {
        return Ok(lo);
    }
    if d_hi == 0.0 {
        return Ok(hi);
    }
    if d_lo.signum() == d_hi.signum() {
        return Err(SpectralError::NoBracket { b_lo, b_hi });
    }
    let lo_sign = d_lo.signum();
    for _ in 0..2000 {
        if hi - lo <= tol_b {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = disc(mid);
        if d == 0.0 {
            return Ok(mid);
        }
        if d.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
