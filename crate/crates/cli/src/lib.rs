//! Command-line front end for `pseudoherm-core`.
//!
//! [`execute`] renders every result into memory so the binary only has to
//! write files and pick an exit status; that keeps runs byte-reproducible and
//! easy to test without spawning processes.

pub mod args;
pub mod error;
pub mod io;

use std::f64::consts::TAU;
use std::path::PathBuf;

use pseudoherm_core::evolution::{evolve, uniform_times};
use pseudoherm_core::fv::{
    dispersion, fv_evolve_strided, fv_to_kg, kg_analytic, FvState, MomentumGrid,
};
use pseudoherm_core::metric::{build_metric, metric_singularity_profile};
use pseudoherm_core::pt_algebra::{random_state, toy_hamiltonian, Involution, ToyParams};
use pseudoherm_core::spectral::{
    classify, locate_exceptional, sweep, toy_energies, ClassifyTolerances,
};
use pseudoherm_core::{linalg, ComplexMatrix, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format};
pub use error::CliError;
pub use io::{parse_matrix_file, write_matrix_file};

use args::{HamiltonianArgs, Packet, ToleranceArgs};
use io::{complex_json, csv_table, fmt_f64, matrix_json, to_json_string};

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    /// Main output, destined for `--out` or stdout.
    pub body: String,
    pub summary: String,
    /// Auxiliary outputs requested by flags such as `--charge-out`.
    pub side_files: Vec<(PathBuf, String)>,
}

impl Report {
    fn new(body: String, summary: String) -> Self {
        Report {
            body,
            summary,
            side_files: Vec::new(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidArgument(msg.into())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid("range bounds must be finite"));
    }
    match n {
        0 => Err(invalid("need at least one point")),
        1 => Ok(vec![lo]),
        _ => Ok((0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()),
    }
}

fn tolerances(t: &ToleranceArgs) -> ClassifyTolerances {
    ClassifyTolerances {
        imag: t.tol_imag,
        pair: t.tol_pair,
        defect_angle: t.tol_defect,
    }
}

fn toy_params(
    a: Option<f64>,
    b: Option<f64>,
    variant: args::Variant,
) -> Result<ToyParams, CliError> {
    match (a, b) {
        (Some(a), Some(b)) => Ok(ToyParams::new(a, b, variant.into())?),
        _ => Err(invalid("give both --a and --b, or --matrix")),
    }
}

fn hamiltonian(h: &HamiltonianArgs) -> Result<ComplexMatrix, CliError> {
    match &h.matrix {
        Some(path) => parse_matrix_file(path),
        None => Ok(toy_hamiltonian(&toy_params(h.a, h.b, h.variant)?)),
    }
}

fn row(values: impl IntoIterator<Item = f64>) -> Vec<String> {
    values.into_iter().map(fmt_f64).collect()
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Classify {
            hamiltonian: h,
            tolerances: t,
        } => run_classify(&hamiltonian(h)?, &tolerances(t), fmt),
        Command::Spectrum { a, b, variant } => {
            run_spectrum(ToyParams::new(*a, *b, (*variant).into())?, fmt)
        }
        Command::Metric {
            hamiltonian: h,
            signs,
            tol,
        } => run_metric(&hamiltonian(h)?, signs.as_deref(), *tol, fmt),
        Command::MetricProfile { a, b_min, b_max, n } => {
            run_metric_profile(*a, &linspace(*b_min, *b_max, *n)?, fmt)
        }
        Command::Evolve {
            hamiltonian: h,
            b_end,
            parity,
            psi0,
            t_final,
            steps,
            every,
        } => run_evolve(
            cli.seed,
            h,
            *b_end,
            parity.as_deref(),
            psi0.as_deref(),
            *t_final,
            *steps,
            *every,
            fmt,
        ),
        Command::Sweep {
            a,
            b_min,
            b_max,
            n,
            tolerances: t,
        } => run_sweep(*a, &linspace(*b_min, *b_max, *n)?, &tolerances(t), fmt),
        Command::LocateEp { a, b_lo, b_hi, tol } => run_locate(*a, *b_lo, *b_hi, *tol, fmt),
        Command::FvDispersion { k_max, n } => {
            if k_max.is_nan() || *k_max < 0.0 {
                return Err(invalid("--k-max must be non-negative"));
            }
            run_dispersion(&linspace(0.0, *k_max, *n)?, fmt)
        }
        Command::FvEvolve {
            k_max,
            n_k,
            packet,
            k0,
            width,
            x0,
            t_final,
            steps,
            charge_out,
            position_out,
            x_max,
            n_x,
        } => {
            let grid = MomentumGrid::symmetric(*k_max, *n_k)?;
            let state0 = match packet {
                Packet::Gaussian => FvState::gaussian(grid, *k0, *width, *x0)?,
                Packet::Random => FvState::random(grid, cli.seed)?,
            };
            let position = match position_out {
                Some(p) => Some((p.clone(), linspace(-x_max, *x_max, *n_x)?)),
                None => None,
            };
            run_fv_evolve(&state0, *t_final, *steps, charge_out.clone(), position, fmt)
        }
        Command::KgCheck {
            psi0,
            psi_dot0,
            k,
            t_final,
            steps,
        } => run_kg_check(
            io::parse_complex(psi0)?,
            io::parse_complex(psi_dot0)?,
            *k,
            *t_final,
            *steps,
            fmt,
        ),
    }
}

fn run_classify(
    h: &ComplexMatrix,
    tols: &ClassifyTolerances,
    fmt: Format,
) -> Result<Report, CliError> {
    let r = classify(h, tols)?;
    let body = match fmt {
        Format::Csv => csv_table(
            &["index", "re", "im"],
            &r.eigenvalues
                .iter()
                .enumerate()
                .map(|(i, z)| vec![i.to_string(), fmt_f64(z.re), fmt_f64(z.im)])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&json!({
            "phase": r.phase.as_str(),
            "eigenvalues": r.eigenvalues.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            "pairing": r.pairing,
            "unpaired": r.unpaired,
            "defect": r.defect.iter().map(|d| json!({
                "eigenvalue": complex_json(d.eigenvalue),
                "geometric": d.geometric,
                "algebraic": d.algebraic,
            })).collect::<Vec<_>>(),
            "min_vector_angle": r.min_vector_angle,
            "diagnostic": r.diagnostic,
        })),
    };
    let listed: Vec<String> = r
        .eigenvalues
        .iter()
        .map(|z| format!("{:.10}{:+.10}i", z.re, z.im))
        .collect();
    Ok(Report::new(
        body,
        format!("{}: [{}]", r.phase, listed.join(", ")),
    ))
}

fn run_spectrum(p: ToyParams, fmt: Format) -> Result<Report, CliError> {
    let numeric = linalg::eigenvalues(&toy_hamiltonian(&p))?;
    let (e1, e2) = toy_energies(&p);
    // Closed form lists ascending; pair each root with its nearest numerical eigenvalue.
    let mut pool = numeric.clone();
    let mut pairs = Vec::new();
    for e in [e1, e2] {
        let (idx, _) = pool
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - e).norm()))
            .fold(
                (0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            );
        pairs.push((e, pool.remove(idx)));
    }
    let worst = pairs
        .iter()
        .map(|(e, z)| (e - z).norm())
        .fold(0.0, f64::max);
    let body = match fmt {
        Format::Csv => csv_table(
            &[
                "n",
                "re_exact",
                "im_exact",
                "re_numeric",
                "im_numeric",
                "abs_error",
            ],
            &pairs
                .iter()
                .enumerate()
                .map(|(i, (e, z))| {
                    let mut r = vec![(i + 1).to_string()];
                    r.extend(row([e.re, e.im, z.re, z.im, (e - z).norm()]));
                    r
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&json!({
            "a": p.a,
            "b": p.b,
            "variant": p.variant,
            "exact": pairs.iter().map(|(e, _)| complex_json(*e)).collect::<Vec<_>>(),
            "numeric": pairs.iter().map(|(_, z)| complex_json(*z)).collect::<Vec<_>>(),
            "max_abs_error": worst,
        })),
    };
    Ok(Report::new(
        body,
        format!("spectrum: max |exact - numeric| = {worst:.3e}"),
    ))
}

fn run_metric(
    h: &ComplexMatrix,
    signs: Option<&str>,
    tol: f64,
    fmt: Format,
) -> Result<Report, CliError> {
    let signs = match signs {
        Some(s) => io::parse_signs(s)?,
        None => vec![1; h.dim()],
    };
    let m = build_metric(h, &signs, tol)?;
    let body = match fmt {
        Format::Csv => {
            let n = m.eta.dim();
            let rows: Vec<Vec<String>> = (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    let z = m.eta[(i, j)];
                    vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]
                })
                .collect();
            csv_table(&["i", "j", "re", "im"], &rows)?
        }
        Format::Json => {
            let mut v = matrix_json(&m.eta);
            let obj = v.as_object_mut().expect("matrix json is an object");
            obj.insert("signs".into(), json!(m.signs));
            obj.insert(
                "intertwining_residual".into(),
                json!(m.intertwining_residual),
            );
            obj.insert("min_eigenvalue".into(), json!(m.min_eigenvalue));
            obj.insert("cond".into(), json!(m.cond));
            obj.insert("eigvec_cond".into(), json!(m.eigvec_cond));
            to_json_string(&v)
        }
    };
    let kind = if m.is_positive_definite() {
        "positive definite"
    } else {
        "indefinite"
    };
    Ok(Report::new(
        body,
        format!(
            "metric {kind}: cond = {:.6e}, min eigenvalue = {:.6e}, residual = {:.3e}",
            m.cond, m.min_eigenvalue, m.intertwining_residual
        ),
    ))
}

fn run_metric_profile(a: f64, b: &[f64], fmt: Format) -> Result<Report, CliError> {
    let prof = metric_singularity_profile(a, b)?;
    let flagged = prof.iter().filter(|p| p.near_defective).count();
    let body = match fmt {
        Format::Csv => csv_table(
            &["b", "cond", "min_eig", "residual"],
            &prof
                .iter()
                .map(|p| row([p.b, p.cond, p.min_eig, p.residual]))
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&Value::Array(
            prof.iter()
                .map(|p| {
                    json!({
                        "b": p.b,
                        "cond": p.cond,
                        "min_eig": p.min_eig,
                        "residual": p.residual,
                        "near_defective": p.near_defective,
                    })
                })
                .collect(),
        )),
    };
    let last = prof.last().expect("profile has at least one point");
    Ok(Report::new(
        body,
        format!(
            "metric-profile: {} points, cond up to {:.6e} at b = {}, {flagged} near-defective",
            prof.len(),
            last.cond,
            last.b
        ),
    ))
}

#[allow(clippy::too_many_arguments)]
fn run_evolve(
    seed: u64,
    h: &HamiltonianArgs,
    b_end: Option<f64>,
    parity: Option<&str>,
    psi0: Option<&str>,
    t_final: f64,
    steps: usize,
    every: usize,
    fmt: Format,
) -> Result<Report, CliError> {
    if every == 0 {
        return Err(invalid("--every must be at least 1"));
    }
    let times = uniform_times(0.0, t_final, steps)?;
    let h_of_t: Box<dyn Fn(f64) -> ComplexMatrix> = match (&h.matrix, b_end) {
        (Some(_), _) => {
            let m = hamiltonian(h)?;
            Box::new(move |_| m.clone())
        }
        (None, None) => {
            let m = hamiltonian(h)?;
            Box::new(move |_| m.clone())
        }
        (None, Some(b1)) => {
            let p0 = toy_params(h.a, h.b, h.variant)?;
            ToyParams::new(p0.a, b1, p0.variant)?;
            Box::new(move |t| {
                let b = p0.b + (b1 - p0.b) * t / t_final;
                toy_hamiltonian(&ToyParams { b, ..p0 })
            })
        }
    };
    let dim = h_of_t(0.0).dim();
    let p = match parity {
        Some(s) => {
            let signs: Vec<f64> = io::parse_signs(s)?.into_iter().map(f64::from).collect();
            Involution::diagonal(&signs)?
        }
        None => Involution::alternating(dim)?,
    };
    let psi0 = match psi0 {
        Some(s) => io::parse_vector(s)?,
        None => random_state(dim, seed),
    };
    let traj = evolve(h_of_t, &psi0, &times, &p)?;

    let keep: Vec<usize> = (0..traj.len())
        .filter(|i| i % every == 0 || i + 1 == traj.len())
        .collect();
    let body = match fmt {
        Format::Csv => {
            let mut header = vec!["t".to_string()];
            for i in 0..dim {
                header.push(format!("re_psi{i}"));
                header.push(format!("im_psi{i}"));
            }
            header.push("re_pseudo_norm".into());
            header.push("im_pseudo_norm".into());
            for i in 0..dim {
                header.push(format!("re_e{i}"));
                header.push(format!("im_e{i}"));
            }
            let rows: Vec<Vec<String>> = keep
                .iter()
                .map(|&i| {
                    let mut vals = vec![traj.times[i]];
                    vals.extend(traj.states[i].iter().flat_map(|z| [z.re, z.im]));
                    vals.extend([traj.pseudo_norms[i].re, traj.pseudo_norms[i].im]);
                    vals.extend(traj.energies[i].iter().flat_map(|z| [z.re, z.im]));
                    row(vals)
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_table(&header, &rows)?
        }
        Format::Json => to_json_string(&Value::Array(
            keep.iter()
                .map(|&i| {
                    json!({
                        "t": traj.times[i],
                        "state": traj.states[i].iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                        "pseudo_norm": complex_json(traj.pseudo_norms[i]),
                        "energies": traj.energies[i].iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )),
    };
    let norms = traj.norms();
    Ok(Report::new(
        body,
        format!(
            "evolve: {} steps, pseudo-norm drift {:.3e}, norm {:.6e} -> {:.6e}",
            steps,
            traj.pseudo_norm_drift(),
            norms[0],
            norms[norms.len() - 1]
        ),
    ))
}

fn run_sweep(
    a: f64,
    grid: &[f64],
    tols: &ClassifyTolerances,
    fmt: Format,
) -> Result<Report, CliError> {
    let s = sweep(a, grid, tols)?;
    let body = match fmt {
        Format::Csv => csv_table(
            &["a", "b", "phase", "re1", "im1", "re2", "im2", "gap"],
            &s.points
                .iter()
                .map(|p| {
                    let [e1, e2] = p.eigenvalues;
                    vec![
                        fmt_f64(p.a),
                        fmt_f64(p.b),
                        p.phase.as_str().to_string(),
                        fmt_f64(e1.re),
                        fmt_f64(e1.im),
                        fmt_f64(e2.re),
                        fmt_f64(e2.im),
                        fmt_f64(p.gap),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&json!({
            "points": s.points.iter().map(|p| json!({
                "a": p.a,
                "b": p.b,
                "phase": p.phase.as_str(),
                "eigenvalues": p.eigenvalues.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                "gap": p.gap,
            })).collect::<Vec<_>>(),
            "transitions": s.transitions.iter().map(|t| json!({
                "b_before": t.b_before,
                "b_after": t.b_after,
                "from": t.from.as_str(),
                "to": t.to.as_str(),
            })).collect::<Vec<_>>(),
        })),
    };
    let trans: Vec<String> = s
        .transitions
        .iter()
        .map(|t| format!("{} -> {} in [{}, {}]", t.from, t.to, t.b_before, t.b_after))
        .collect();
    Ok(Report::new(
        body,
        format!(
            "sweep: {} points; {}",
            s.points.len(),
            if trans.is_empty() {
                "no transitions".into()
            } else {
                trans.join("; ")
            }
        ),
    ))
}

fn run_locate(a: f64, b_lo: f64, b_hi: f64, tol: f64, fmt: Format) -> Result<Report, CliError> {
    let b = locate_exceptional(a, b_lo, b_hi, tol)?;
    let body = match fmt {
        Format::Csv => csv_table(
            &["a", "b_lo", "b_hi", "tol", "b_star"],
            &[row([a, b_lo, b_hi, tol, b])],
        )?,
        Format::Json => {
            to_json_string(&json!({ "a": a, "b_lo": b_lo, "b_hi": b_hi, "tol": tol, "b_star": b }))
        }
    };
    Ok(Report::new(body, format!("{b}")))
}

fn run_dispersion(ks: &[f64], fmt: Format) -> Result<Report, CliError> {
    let rows: Vec<(f64, f64, f64)> = ks
        .iter()
        .map(|&k| {
            let (lo, hi) = dispersion(k);
            (k, lo, hi)
        })
        .collect();
    let body = match fmt {
        Format::Csv => csv_table(
            &["k", "minus_omega", "plus_omega"],
            &rows
                .iter()
                .map(|&(k, lo, hi)| row([k, lo, hi]))
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&Value::Array(
            rows.iter()
                .map(|&(k, lo, hi)| json!({ "k": k, "minus_omega": lo, "plus_omega": hi }))
                .collect(),
        )),
    };
    Ok(Report::new(
        body,
        format!("fv-dispersion: {} momenta", rows.len()),
    ))
}

/// `f(x) = (1/2π) Σ_k w_k f_k e^{ikx}` for ψ, φ and χ.
fn position_table(state: &FvState, xs: &[f64]) -> Result<String, CliError> {
    let (psi, _) = fv_to_kg(state);
    let k = state.grid.k_values();
    let w = state.grid.weights();
    let rows: Vec<Vec<String>> = xs
        .par_iter()
        .map(|&x| {
            let mut acc = [C64::new(0.0, 0.0); 3];
            for j in 0..k.len() {
                let e = C64::from_polar(w[j] / TAU, k[j] * x);
                acc[0] += psi[j] * e;
                acc[1] += state.phi[j] * e;
                acc[2] += state.chi[j] * e;
            }
            let density = acc[1].norm_sqr() - acc[2].norm_sqr();
            row([
                x, acc[0].re, acc[0].im, acc[1].re, acc[1].im, acc[2].re, acc[2].im, density,
            ])
        })
        .collect();
    csv_table(
        &[
            "x",
            "re_psi",
            "im_psi",
            "re_phi",
            "im_phi",
            "re_chi",
            "im_chi",
            "charge_density",
        ],
        &rows,
    )
}

fn run_fv_evolve(
    state0: &FvState,
    t_final: f64,
    steps: usize,
    charge_out: Option<PathBuf>,
    position: Option<(PathBuf, Vec<f64>)>,
    fmt: Format,
) -> Result<Report, CliError> {
    let run = fv_evolve_strided(state0, t_final, steps, steps.max(1))?;
    let last = run.final_state();
    let body = match fmt {
        Format::Csv => csv_table(
            &["k", "re_phi", "im_phi", "re_chi", "im_chi"],
            &last
                .grid
                .k_values()
                .iter()
                .zip(last.phi.iter().zip(&last.chi))
                .map(|(&k, (p, c))| row([k, p.re, p.im, c.re, c.im]))
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&json!({
            "t": t_final,
            "k": last.grid.k_values(),
            "weights": last.grid.weights(),
            "phi": last.phi.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            "chi": last.chi.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            "charge": run.charges[run.charges.len() - 1],
        })),
    };
    let mut report = Report::new(
        body,
        format!(
            "fv-evolve: {} modes, {} steps, charge {:.12e}, relative drift {:.3e}",
            last.grid.len(),
            steps,
            run.charges[0],
            run.charge_drift()
        ),
    );
    if let Some(path) = charge_out {
        let rows: Vec<Vec<String>> = run
            .times
            .iter()
            .zip(&run.charges)
            .map(|(&t, &q)| row([t, q]))
            .collect();
        report
            .side_files
            .push((path, csv_table(&["t", "Q"], &rows)?));
    }
    if let Some((path, xs)) = position {
        report.side_files.push((path, position_table(last, &xs)?));
    }
    Ok(report)
}

fn run_kg_check(
    psi0: C64,
    psi_dot0: C64,
    k: f64,
    t_final: f64,
    steps: usize,
    fmt: Format,
) -> Result<Report, CliError> {
    let grid = MomentumGrid::single(k)?;
    let state0 = pseudoherm_core::fv::kg_to_fv(grid, &[psi0], &[psi_dot0])?;
    let run = pseudoherm_core::fv::fv_evolve(&state0, t_final, steps)?;
    let samples: Vec<(f64, C64, C64)> = run
        .states
        .iter()
        .zip(&run.recorded_steps)
        .map(|(s, &i)| {
            let t = run.times[i];
            (t, fv_to_kg(s).0[0], kg_analytic(psi0, psi_dot0, k, t))
        })
        .collect();
    let residual = samples
        .iter()
        .map(|(_, a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let body = match fmt {
        Format::Csv => csv_table(
            &["t", "re_psi", "im_psi", "re_exact", "im_exact", "abs_error"],
            &samples
                .iter()
                .map(|&(t, a, b)| row([t, a.re, a.im, b.re, b.im, (a - b).norm()]))
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json_string(&json!({
            "k": k,
            "psi0": complex_json(psi0),
            "psi_dot0": complex_json(psi_dot0),
            "t_final": t_final,
            "steps": steps,
            "residual": residual,
        })),
    };
    Ok(Report::new(
        body,
        format!("kg-check: max deviation {residual:.3e}"),
    ))
}
