//! Time evolution with piecewise-constant midpoint propagators.
//!
//! Each step applies `exp(-i H(t + dt/2) dt)`, which is exactly pseudo-unitary
//! whenever the sampled `H` is pseudo-Hermitian, so the pseudo-norm
//! `⟨ψ|P|ψ⟩` drifts only through rounding.

use thiserror::Error;

use crate::linalg::{eigenvalues, expm_scaled, vec_dot, ComplexMatrix, LinalgError, C64};
use crate::pt_algebra::Involution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("step {step} rejected: {reason}")]
    StepRejected { step: usize, reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl EvolutionError {
    pub fn name(&self) -> &'static str {
        match self {
            EvolutionError::InvalidGrid(_) => "InvalidGrid",
            EvolutionError::DimensionMismatch { .. } => "DimensionMismatch",
            EvolutionError::StepRejected { .. } => "StepRejected",
            EvolutionError::Linalg(e) => e.name(),
        }
    }
}

/// `exp(-i H dt)`.
pub fn propagator(h: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix, EvolutionError> {
    if !dt.is_finite() {
        return Err(EvolutionError::InvalidGrid(format!("non-finite step {dt}")));
    }
    Ok(expm_scaled(h, C64::new(0.0, -dt))?)
}

/// `||U† P U - P||_F / ||P||_F`.
pub fn check_pseudounitarity(u: &ComplexMatrix, p: &Involution) -> Result<f64, EvolutionError> {
    if u.dim() != p.dim() {
        return Err(EvolutionError::DimensionMismatch {
            left: u.dim(),
            right: p.dim(),
        });
    }
    let pm = p.matrix();
    let lhs = &(&u.adjoint() * pm) * u;
    Ok((&lhs - pm).frobenius_norm() / pm.frobenius_norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `H(t_i)` at each recorded time.
    pub hamiltonians: Vec<ComplexMatrix>,
    pub states: Vec<Vec<C64>>,
    /// `⟨ψ|P|ψ⟩`, real up to rounding.
    pub pseudo_norms: Vec<C64>,
    /// Eigenvalues of `H(t_i)`, descending by real part.
    pub energies: Vec<Vec<C64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_i |Q(t_i) - Q(t_0)| / |Q(t_0)|`.
    pub fn pseudo_norm_drift(&self) -> f64 {
        let q0 = self.pseudo_norms[0];
        let worst = self
            .pseudo_norms
            .iter()
            .map(|q| (q - q0).norm())
            .fold(0.0, f64::max);
        worst / q0.norm()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| crate::linalg::vec_norm(s))
            .collect()
    }
}

fn pseudo_norm(p: &Involution, psi: &[C64]) -> C64 {
    vec_dot(psi, &p.matrix().matvec(psi))
}

fn finite(v: &[C64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn sample<F>(h_of_t: &F, t: f64, dim: usize, step: usize) -> Result<ComplexMatrix, EvolutionError>
where
    F: Fn(f64) -> ComplexMatrix,
{
    let h = h_of_t(t);
    if h.dim() != dim {
        return Err(EvolutionError::DimensionMismatch {
            left: dim,
            right: h.dim(),
        });
    }
    if !h.is_finite() {
        return Err(EvolutionError::StepRejected {
            step,
            reason: format!("H({t}) has non-finite entries"),
        });
    }
    Ok(h)
}

/// Evolves `psi0` across `times` with `H` sampled at step midpoints.
///
/// The propagator is reused while consecutive midpoint samples and step
/// sizes coincide, so constant Hamiltonians cost one exponential.
pub fn evolve<F>(
    h_of_t: F,
    psi0: &[C64],
    times: &[f64],
    p: &Involution,
) -> Result<Trajectory, EvolutionError>
where
    F: Fn(f64) -> ComplexMatrix,
{
    let dim = psi0.len();
    if dim != p.dim() {
        return Err(EvolutionError::DimensionMismatch {
            left: dim,
            right: p.dim(),
        });
    }
    if times.is_empty() {
        return Err(EvolutionError::InvalidGrid("no time points".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(EvolutionError::InvalidGrid("non-finite time".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvolutionError::InvalidGrid(
            "times must be strictly increasing".into(),
        ));
    }
    if !finite(psi0) {
        return Err(EvolutionError::StepRejected {
            step: 0,
            reason: "initial state has non-finite entries".into(),
        });
    }

    let n = times.len();
    let mut traj = Trajectory {
        times: times.to_vec(),
        hamiltonians: Vec::with_capacity(n),
        states: Vec::with_capacity(n),
        pseudo_norms: Vec::with_capacity(n),
        energies: Vec::with_capacity(n),
    };
    let record = |traj: &mut Trajectory, step: usize, h: ComplexMatrix, psi: Vec<C64>| {
        let energies = eigenvalues(&h).map_err(|e| EvolutionError::StepRejected {
            step,
            reason: e.to_string(),
        })?;
        traj.pseudo_norms.push(pseudo_norm(p, &psi));
        traj.energies.push(energies);
        traj.hamiltonians.push(h);
        traj.states.push(psi);
        Ok::<_, EvolutionError>(())
    };

    record(
        &mut traj,
        0,
        sample(&h_of_t, times[0], dim, 0)?,
        psi0.to_vec(),
    )?;
    let mut psi = psi0.to_vec();
    let mut cache: Option<(ComplexMatrix, f64, ComplexMatrix)> = None;
    for step in 1..n {
        let (t0, t1) = (times[step - 1], times[step]);
        let dt = t1 - t0;
        let h_mid = sample(&h_of_t, t0 + 0.5 * dt, dim, step)?;
        let reuse = matches!(&cache, Some((h, d, _)) if *d == dt && *h == h_mid);
        if !reuse {
            let u = propagator(&h_mid, dt).map_err(|e| EvolutionError::StepRejected {
                step,
                reason: e.to_string(),
            })?;
            cache = Some((h_mid, dt, u));
        }
        let u = &cache.as_ref().expect("propagator cached above").2;
        psi = u.matvec(&psi);
        if !finite(&psi) {
            return Err(EvolutionError::StepRejected {
                step,
                reason: format!("state became non-finite at t = {t1}"),
            });
        }
        let h = sample(&h_of_t, t1, dim, step)?;
        record(&mut traj, step, h, psi.clone())?;
    }
    Ok(traj)
}

/// `n + 1` equally spaced times from `t0` to `t1`.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>, EvolutionError> {
    if n == 0 || !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
        return Err(EvolutionError::InvalidGrid(format!(
            "need t1 > t0 and n >= 1, got [{t0}, {t1}] with n = {n}"
        )));
    }
    let dt = (t1 - t0) / n as f64;
    Ok((0..=n).map(|i| t0 + dt * i as f64).collect())
}
