use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pseudoherm_core::pt_algebra::ToyVariant;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "pseudoherm",
    version,
    about = "Pseudo-Hermitian and PT-symmetric spectra, metrics and dynamics"
)]
pub struct Cli {
    /// Seed for every randomized input (initial states, random packets).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    PtMinus,
    HermitianPlus,
}

impl From<Variant> for ToyVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::PtMinus => ToyVariant::PtMinus,
            Variant::HermitianPlus => ToyVariant::HermitianPlus,
        }
    }
}

/// Either the 2x2 toy model or a matrix file.
#[derive(Debug, Clone, Args)]
pub struct HamiltonianArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "matrix")]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "matrix")]
    pub b: Option<f64>,
    #[arg(long, value_enum, default_value_t = Variant::PtMinus)]
    pub variant: Variant,
    /// JSON matrix file: {"dim": N, "entries": [[[re, im], ...], ...]}
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ToleranceArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tol_imag: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_pair: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_defect: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify a spectrum as AllReal, ConjugatePairs or Exceptional.
    Classify {
        #[command(flatten)]
        hamiltonian: HamiltonianArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Closed-form toy energies next to the numerical eigenvalues.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, value_enum, default_value_t = Variant::PtMinus)]
        variant: Variant,
    },
    /// Metric operator for an unbroken-phase Hamiltonian.
    Metric {
        #[command(flatten)]
        hamiltonian: HamiltonianArgs,
        /// Comma-separated ±1 per eigenvalue in spectral order (default all +1).
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// cond(η) of the toy model on b in [b-min, b-max].
    MetricProfile {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        b_min: f64,
        #[arg(long, default_value_t = 0.999, allow_hyphen_values = true)]
        b_max: f64,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Midpoint time evolution with pseudo-norm and eigenvalue tracking.
    Evolve {
        #[command(flatten)]
        hamiltonian: HamiltonianArgs,
        /// Ramp b linearly from --b to this value over [0, t-final].
        #[arg(long, allow_hyphen_values = true, conflicts_with = "matrix")]
        b_end: Option<f64>,
        /// Diagonal of the involution P as comma-separated ±1 (default alternating).
        #[arg(long, allow_hyphen_values = true)]
        parity: Option<String>,
        /// Initial state as "re,im;re,im;..." (default: seeded random unit vector).
        #[arg(long, allow_hyphen_values = true)]
        psi0: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Emit every n-th time point.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Phase diagram of the toy model along b.
    Sweep {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        b_max: f64,
        #[arg(long, default_value_t = 201)]
        n: usize,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Bisect for the exceptional point of the toy model.
    LocateEp {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b_lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        b_hi: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// ±ω(k) on k in [0, k-max].
    FvDispersion {
        #[arg(long)]
        k_max: f64,
        #[arg(long)]
        n: usize,
    },
    /// Evolve a Klein-Gordon packet in two-component form.
    FvEvolve {
        #[arg(long, default_value_t = 8.0)]
        k_max: f64,
        /// Points on the symmetric momentum grid.
        #[arg(long, default_value_t = 256)]
        n_k: usize,
        #[arg(long, value_enum, default_value_t = Packet::Gaussian)]
        packet: Packet,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k0: f64,
        #[arg(long, default_value_t = 0.5)]
        width: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, default_value_t = 10.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Write the (t, Q) log here.
        #[arg(long)]
        charge_out: Option<PathBuf>,
        /// Write the final field on a position grid here.
        #[arg(long)]
        position_out: Option<PathBuf>,
        #[arg(long, default_value_t = 20.0)]
        x_max: f64,
        #[arg(long, default_value_t = 401)]
        n_x: usize,
    },
    /// Compare a single evolved mode with the exact Klein-Gordon solution.
    KgCheck {
        /// ψ(0) as "re,im".
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        psi0: String,
        /// ψ̇(0) as "re,im".
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        psi_dot0: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value_t = 20.0)]
        t_final: f64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Packet {
    /// Gaussian in φ only.
    Gaussian,
    /// Seeded random φ and χ.
    Random,
}
