//! Free Klein-Gordon field in two-component first-order form on a 1D momentum grid.
//!
//! Natural units (ħ = c = m = 1). Each plane-wave mode `k` carries a pair
//! `(φ, χ)` with `ψ = φ + χ`, evolved by `i ∂ₜ(φ, χ) = B(k)(φ, χ)` where
//!
//! ```text
//! B(k) = [[1 + k²/2,  k²/2     ],
//!         [-k²/2,    -1 - k²/2 ]]
//! ```
//!
//! `B(k)` is σ₃-pseudo-Hermitian with eigenvalues `±√(1 + k²)`, so the
//! σ₃ form `Q = Σ w (|φ|² - |χ|²)` is conserved while the ordinary norm is not.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::evolution::propagator;
use crate::linalg::{ComplexMatrix, LinalgError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FvError {
    #[error("invalid momentum grid: {0}")]
    InvalidGrid(String),
    #[error("grid has {expected} points but data has {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("n_steps must be at least 1")]
    InvalidSteps,
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl FvError {
    pub fn name(&self) -> &'static str {
        match self {
            FvError::InvalidGrid(_) => "InvalidGrid",
            FvError::GridMismatch { .. } => "GridMismatch",
            FvError::InvalidSteps => "InvalidSteps",
            FvError::NonFinite(_) => "NonFinite",
            FvError::Linalg(e) => e.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentumGrid {
    k_values: Vec<f64>,
    weights: Vec<f64>,
}

impl MomentumGrid {
    /// `n` evenly spaced points on `[k_min, k_max]` with trapezoid weights.
    /// A single point gets weight 1.
    pub fn uniform(k_min: f64, k_max: f64, n: usize) -> Result<Self, FvError> {
        if !k_min.is_finite() || !k_max.is_finite() {
            return Err(FvError::InvalidGrid("bounds must be finite".into()));
        }
        match n {
            0 => Err(FvError::InvalidGrid("need at least one point".into())),
            1 => Self::from_points(vec![k_min], vec![1.0]),
            _ => {
                if k_max <= k_min {
                    return Err(FvError::InvalidGrid(format!(
                        "need k_max > k_min, got [{k_min}, {k_max}]"
                    )));
                }
                let h = (k_max - k_min) / (n - 1) as f64;
                let k = (0..n).map(|i| k_min + h * i as f64).collect();
                let mut w = vec![h; n];
                w[0] = 0.5 * h;
                w[n - 1] = 0.5 * h;
                Self::from_points(k, w)
            }
        }
    }

    /// Uniform grid on `[-k_max, k_max]`.
    pub fn symmetric(k_max: f64, n: usize) -> Result<Self, FvError> {
        Self::uniform(-k_max, k_max, n)
    }

    pub fn single(k: f64) -> Result<Self, FvError> {
        Self::from_points(vec![k], vec![1.0])
    }

    pub fn from_points(k_values: Vec<f64>, weights: Vec<f64>) -> Result<Self, FvError> {
        if k_values.is_empty() {
            return Err(FvError::InvalidGrid("need at least one point".into()));
        }
        if weights.len() != k_values.len() {
            return Err(FvError::GridMismatch {
                expected: k_values.len(),
                got: weights.len(),
            });
        }
        if k_values.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(FvError::InvalidGrid(
                "points and weights must be finite".into(),
            ));
        }
        if k_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FvError::InvalidGrid(
                "k values must be strictly increasing".into(),
            ));
        }
        Ok(MomentumGrid { k_values, weights })
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FvBlock {
    pub k: f64,
    pub matrix: ComplexMatrix,
}

pub fn fv_block(k: f64) -> FvBlock {
    let h = 0.5 * k * k;
    let matrix = ComplexMatrix::from_real_rows(&[[1.0 + h, h], [-h, -1.0 - h]])
        .expect("2x2 literal is square");
    FvBlock { k, matrix }
}

/// `ω(k) = √(1 + k²)`.
pub fn omega(k: f64) -> f64 {
    1f64.hypot(k)
}

/// Eigenvalues of `fv_block(k)` as `(-ω, +ω)`.
pub fn dispersion(k: f64) -> (f64, f64) {
    let w = omega(k);
    (-w, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FvState {
    pub grid: MomentumGrid,
    pub phi: Vec<C64>,
    pub chi: Vec<C64>,
}

impl FvState {
    pub fn new(grid: MomentumGrid, phi: Vec<C64>, chi: Vec<C64>) -> Result<Self, FvError> {
        for v in [&phi, &chi] {
            if v.len() != grid.len() {
                return Err(FvError::GridMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
        }
        if phi
            .iter()
            .chain(&chi)
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(FvError::NonFinite("state amplitudes".into()));
        }
        Ok(FvState { grid, phi, chi })
    }

    /// Gaussian profile in `φ` only, centred at `k0` with momentum width `width`
    /// and a position offset `x0` carried as the phase `e^{-i k x0}`.
    pub fn gaussian(grid: MomentumGrid, k0: f64, width: f64, x0: f64) -> Result<Self, FvError> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(FvError::InvalidGrid(format!(
                "width must be positive, got {width}"
            )));
        }
        let phi = grid
            .k_values()
            .iter()
            .map(|&k| {
                let z = (k - k0) / width;
                C64::from_polar((-0.5 * z * z).exp(), -k * x0)
            })
            .collect();
        let chi = vec![C64::new(0.0, 0.0); grid.len()];
        Self::new(grid, phi, chi)
    }

    /// Unit-amplitude plane wave (`ψ = 1`) on one mode of the chosen frequency branch.
    pub fn plane_wave(grid: MomentumGrid, index: usize, branch: Branch) -> Result<Self, FvError> {
        if index >= grid.len() {
            return Err(FvError::GridMismatch {
                expected: grid.len(),
                got: index,
            });
        }
        let w = omega(grid.k_values()[index]);
        let sign = match branch {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        };
        let mut psi = vec![C64::new(0.0, 0.0); grid.len()];
        let mut psi_dot = psi.clone();
        psi[index] = C64::new(1.0, 0.0);
        psi_dot[index] = C64::new(0.0, -sign * w);
        kg_to_fv(grid, &psi, &psi_dot)
    }

    /// Independent components uniform in `[-1, 1]²`.
    pub fn random(grid: MomentumGrid, seed: u64) -> Result<Self, FvError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<C64> {
            (0..n)
                .map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect()
        };
        let phi = draw(grid.len());
        let chi = draw(grid.len());
        Self::new(grid, phi, chi)
    }

    pub fn charge(&self) -> f64 {
        charge(self)
    }

    /// Ordinary two-component norm `Σ w (|φ|² + |χ|²)`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(self.phi.iter().zip(&self.chi))
            .map(|(w, (p, c))| w * (p.norm_sqr() + c.norm_sqr()))
            .sum()
    }
}

/// `φ = (ψ + iψ̇)/2`, `χ = (ψ - iψ̇)/2`.
pub fn kg_to_fv(grid: MomentumGrid, psi: &[C64], psi_dot: &[C64]) -> Result<FvState, FvError> {
    for v in [psi, psi_dot] {
        if v.len() != grid.len() {
            return Err(FvError::GridMismatch {
                expected: grid.len(),
                got: v.len(),
            });
        }
    }
    let i = C64::i();
    let phi = psi
        .iter()
        .zip(psi_dot)
        .map(|(p, d)| 0.5 * (p + i * d))
        .collect();
    let chi = psi
        .iter()
        .zip(psi_dot)
        .map(|(p, d)| 0.5 * (p - i * d))
        .collect();
    FvState::new(grid, phi, chi)
}

/// `ψ = φ + χ`, `ψ̇ = -i(φ - χ)`.
pub fn fv_to_kg(state: &FvState) -> (Vec<C64>, Vec<C64>) {
    let i = C64::i();
    let psi = state
        .phi
        .iter()
        .zip(&state.chi)
        .map(|(p, c)| p + c)
        .collect();
    let psi_dot = state
        .phi
        .iter()
        .zip(&state.chi)
        .map(|(p, c)| -i * (p - c))
        .collect();
    (psi, psi_dot)
}

/// `Q = Σ w (|φ|² - |χ|²)`.
pub fn charge(state: &FvState) -> f64 {
    state
        .grid
        .weights()
        .iter()
        .zip(state.phi.iter().zip(&state.chi))
        .map(|(w, (p, c))| w * (p.norm_sqr() - c.norm_sqr()))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FvRun {
    /// Time of every step, `n_steps + 1` entries.
    pub times: Vec<f64>,
    /// Charge after every step.
    pub charges: Vec<f64>,
    /// Step indices at which `states` were recorded.
    pub recorded_steps: Vec<usize>,
    pub states: Vec<FvState>,
}

impl FvRun {
    pub fn final_state(&self) -> &FvState {
        self.states
            .last()
            .expect("the final step is always recorded")
    }

    /// `max |Q(t) - Q(0)| / |Q(0)|`.
    pub fn charge_drift(&self) -> f64 {
        let q0 = self.charges[0];
        let worst = self
            .charges
            .iter()
            .map(|q| (q - q0).abs())
            .fold(0.0, f64::max);
        worst / q0.abs()
    }
}

/// Evolves every mode by `exp(-i B(k) dt)` and records all intermediate states.
pub fn fv_evolve(state0: &FvState, t_final: f64, n_steps: usize) -> Result<FvRun, FvError> {
    fv_evolve_strided(state0, t_final, n_steps, 1)
}

/// As [`fv_evolve`], keeping only every `stride`-th state plus the last one.
/// The charge is still logged at every step.
pub fn fv_evolve_strided(
    state0: &FvState,
    t_final: f64,
    n_steps: usize,
    stride: usize,
) -> Result<FvRun, FvError> {
    if n_steps == 0 || stride == 0 {
        return Err(FvError::InvalidSteps);
    }
    if !t_final.is_finite() {
        return Err(FvError::NonFinite(format!("t_final = {t_final}")));
    }
    let dt = t_final / n_steps as f64;
    let steppers = state0
        .grid
        .k_values()
        .par_iter()
        .map(|&k| {
            let u = propagator(&fv_block(k).matrix, dt).map_err(|e| match e {
                crate::evolution::EvolutionError::Linalg(l) => FvError::Linalg(l),
                other => FvError::NonFinite(other.to_string()),
            })?;
            Ok([u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]])
        })
        .collect::<Result<Vec<_>, FvError>>()?;

    let mut state = state0.clone();
    let mut run = FvRun {
        times: (0..=n_steps).map(|i| dt * i as f64).collect(),
        charges: Vec::with_capacity(n_steps + 1),
        recorded_steps: vec![0],
        states: vec![state0.clone()],
    };
    run.charges.push(charge(&state));
    for step in 1..=n_steps {
        state
            .phi
            .par_iter_mut()
            .zip(state.chi.par_iter_mut())
            .zip(steppers.par_iter())
            .with_min_len(64)
            .for_each(|((p, c), u)| {
                let (p0, c0) = (*p, *c);
                *p = u[0] * p0 + u[1] * c0;
                *c = u[2] * p0 + u[3] * c0;
            });
        run.charges.push(charge(&state));
        if step % stride == 0 || step == n_steps {
            run.recorded_steps.push(step);
            run.states.push(state.clone());
        }
    }
    Ok(run)
}

/// Closed-form single-mode solution `A e^{-iωt} + B e^{iωt}`.
pub fn kg_analytic(psi0: C64, psi_dot0: C64, k: f64, t: f64) -> C64 {
    let w = omega(k);
    let i = C64::i();
    let a = 0.5 * (psi0 + i * psi_dot0 / w);
    let b = 0.5 * (psi0 - i * psi_dot0 / w);
    a * C64::from_polar(1.0, -w * t) + b * C64::from_polar(1.0, w * t)
}

/// Largest `|ψ_fv(t) - ψ_exact(t)|` over the `n_steps + 1` grid times in `[0, t_final]`.
pub fn kg_consistency(
    psi0: C64,
    psi_dot0: C64,
    k: f64,
    t_final: f64,
    n_steps: usize,
) -> Result<f64, FvError> {
    let grid = MomentumGrid::single(k)?;
    let state0 = kg_to_fv(grid, &[psi0], &[psi_dot0])?;
    let run = fv_evolve(&state0, t_final, n_steps)?;
    Ok(run
        .states
        .iter()
        .zip(&run.recorded_steps)
        .map(|(s, &i)| {
            let (psi, _) = fv_to_kg(s);
            (psi[0] - kg_analytic(psi0, psi_dot0, k, run.times[i])).norm()
        })
        .fold(0.0, f64::max))
}
