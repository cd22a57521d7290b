//! Acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! A failing criterion is reported but does not stop the rest of the test
//! suite; set `ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use pseudoherm_cli::io::{matrix_json, parse_matrix_str, to_json_string};
use pseudoherm_core::evolution::{check_pseudounitarity, evolve, propagator, uniform_times};
use pseudoherm_core::fv::{
    dispersion, fv_block, fv_evolve_strided, kg_consistency, omega, FvState, MomentumGrid,
};
use pseudoherm_core::linalg::{eig, eigenvalues, expm};
use pseudoherm_core::metric::{build_metric, metric_singularity_profile};
use pseudoherm_core::pt_algebra::{
    random_matrix, random_pseudo_hermitian, random_state, toy_hamiltonian, Involution, ToyParams,
    ToyVariant,
};
use pseudoherm_core::spectral::{
    classify, locate_exceptional, sweep, toy_energies, ClassifyTolerances, Phase,
};
use pseudoherm_core::{ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn toy(a: f64, b: f64) -> ComplexMatrix {
    toy_hamiltonian(&ToyParams::pt(a, b).unwrap())
}

/// Greedy nearest matching; returns the worst relative distance.
fn match_spectra(exact: &[C64], numeric: &[C64]) -> f64 {
    let mut pool = numeric.to_vec();
    let mut worst = 0.0f64;
    for e in exact {
        let (idx, d) = pool
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - e).norm()))
            .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        pool.remove(idx);
        worst = worst.max(d / e.norm());
    }
    worst
}

fn symmetric_grid(lo_hi: f64, n: usize) -> Vec<f64> {
    // Mirrored so that |a| = |b| holds exactly where it should.
    let mut g: Vec<f64> = (0..n)
        .map(|i| -lo_hi + 2.0 * lo_hi * i as f64 / (n - 1) as f64)
        .collect();
    for i in 0..n / 2 {
        g[n - 1 - i] = -g[i];
    }
    g
}

fn criterion_1() -> Outcome {
    let grid = symmetric_grid(3.0, 200);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    for variant in [ToyVariant::PtMinus, ToyVariant::HermitianPlus] {
        for &a in &grid {
            for &b in &grid {
                let p = ToyParams::new(a, b, variant).unwrap();
                if variant == ToyVariant::PtMinus
                    && (a * a - b * b).abs() <= 1e-12 * (a * a + b * b)
                {
                    // Exceptional points have zero energies; covered by criterion 2.
                    skipped += 1;
                    continue;
                }
                let (e1, e2) = toy_energies(&p);
                let num = eigenvalues(&toy_hamiltonian(&p)).unwrap();
                worst = worst.max(match_spectra(&[e1, e2], &num));
                checked += 1;
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{checked} grid points, {skipped} exceptional points skipped, worst relative error {worst:.2e}"),
    )
}

fn criterion_2() -> Outcome {
    let tols = ClassifyTolerances::default();
    let grid: Vec<f64> = (0..=2000).map(|i| i as f64 / 1000.0).collect();
    let s = sweep(1.0, &grid, &tols).unwrap();
    let mut wrong = 0;
    for p in &s.points {
        let expected = if p.b < 1.0 {
            Phase::AllReal
        } else if p.b > 1.0 {
            Phase::ConjugatePairs
        } else {
            Phase::Exceptional
        };
        if p.phase != expected {
            wrong += 1;
        }
    }
    let b_star = locate_exceptional(1.0, 0.0, 2.0, 1e-10).unwrap();
    let ep_err = (b_star - 1.0).abs();
    let mut nilpotent = true;
    for a in [1.0, 0.3, -2.7, 1e3, 1.0 / 3.0] {
        for b in [a, -a] {
            let h = toy(a, b);
            nilpotent &= (&h * &h).max_abs() == 0.0;
        }
    }
    outcome(
        wrong == 0 && ep_err <= 1e-10 && nilpotent,
        format!(
            "{} sweep points, {wrong} misclassified, |b* - 1| = {ep_err:.2e}, toy(a, ±a)² = 0: {nilpotent}",
            s.points.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut non_real = 0usize;
    let mut trials = 0usize;
    for n in [2usize, 4, 8] {
        let p = Involution::alternating(n).unwrap();
        for seed in 0..1000u64 {
            let h = random_pseudo_hermitian(n, &p, seed).unwrap();
            let ev = eigenvalues(&h).unwrap();
            trials += 1;
            for (i, z) in ev.iter().enumerate() {
                if z.im.abs() <= 1e-10 {
                    continue;
                }
                non_real += 1;
                let d = ev
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, w)| (w - z.conj()).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{trials} matrices, {non_real} non-real eigenvalues, worst partner distance {worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_eig = f64::INFINITY;
    let mut worst_res = 0.0f64;
    let mut failures = 0;
    for _ in 0..500 {
        let a: f64 = rng.gen_range(0.1..3.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let b = rng.gen_range(-0.9..=0.9) * a.abs();
        match build_metric(&toy(a, b), &[1, 1], 1e-10) {
            Ok(m) => {
                min_eig = min_eig.min(m.min_eigenvalue);
                worst_res = worst_res.max(m.intertwining_residual);
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && min_eig > 0.0 && worst_res <= 1e-10,
        format!("500 instances, {failures} errors, smallest eigenvalue {min_eig:.3e}, worst residual {worst_res:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let cond = |b: f64| build_metric(&toy(1.0, b), &[1, 1], 1e-10).unwrap().cond;
    let ratio = cond(0.999) / cond(0.9);
    let grid: Vec<f64> = (0..200).map(|i| 0.5 + 0.499 * i as f64 / 199.0).collect();
    let prof = metric_singularity_profile(1.0, &grid).unwrap();
    let monotone = prof.windows(2).all(|w| w[1].cond > w[0].cond);
    outcome(
        ratio >= 10.0 && monotone && prof.len() == grid.len(),
        format!(
            "cond(0.999)/cond(0.9) = {ratio:.2}, profile of {} points monotone: {monotone}",
            prof.len()
        ),
    )
}

/// Real spectrum dressed by a pseudo-unitary similarity.
fn dressed_real_spectrum(n: usize, seed: u64, p: &Involution) -> ComplexMatrix {
    let k = random_pseudo_hermitian(n, p, seed).unwrap().scale_real(0.3);
    let v = expm(&k.scale(C64::new(0.0, -1.0))).unwrap();
    let v_inv = p.conjugate(&v.adjoint());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<f64> = (0..n)
        .map(|i| i as f64 + rng.gen_range(-0.4..0.4))
        .collect();
    &(&v * &ComplexMatrix::from_real_diag(&d).unwrap()) * &v_inv
}

/// A toy Jordan block `toy(a, ±a)` in the leading corner, real diagonal elsewhere.
fn exactly_defective(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: f64 = rng.gen_range(0.2..2.0);
    let j = toy(a, if rng.gen::<bool>() { a } else { -a });
    let mut h = ComplexMatrix::zeros(n);
    for r in 0..2 {
        for c in 0..2 {
            h[(r, c)] = j[(r, c)];
        }
    }
    for i in 2..n {
        h[(i, i)] = C64::new(rng.gen_range(-2.0..2.0), 0.0);
    }
    h
}

fn broken(n: usize, seed: u64, p: &Involution) -> ComplexMatrix {
    let tols = ClassifyTolerances::default();
    (0..)
        .map(|k| random_pseudo_hermitian(n, p, seed + 100_000 * k).unwrap())
        .find(|h| classify(h, &tols).unwrap().phase == Phase::ConjugatePairs)
        .unwrap()
}

fn criterion_6() -> Outcome {
    let tols = ClassifyTolerances::default();
    let mut worst = [0.0f64; 3];
    let mut passed = 0usize;
    let mut total = 0usize;
    let mut worst_floor = 0.0f64;
    let mut regimes_ok = true;
    let mut instances = Vec::new();
    for i in 0..200u64 {
        let n = [2usize, 4, 6][(i as usize / 3) % 3];
        let p = Involution::alternating(n).unwrap();
        let (h, expected) = match i % 3 {
            0 => (dressed_real_spectrum(n, i, &p), Phase::AllReal),
            1 => (broken(n, i, &p), Phase::ConjugatePairs),
            _ => (exactly_defective(n, i), Phase::Exceptional),
        };
        regimes_ok &= classify(&h, &tols).unwrap().phase == expected;
        for (slot, t) in [0.1, 1.0, 5.0].into_iter().enumerate() {
            let u = propagator(&h, t).unwrap();
            let r = check_pseudounitarity(&u, &p).unwrap();
            worst[slot] = worst[slot].max(r);
            worst_floor = worst_floor.max(r / (f64::EPSILON * u.frobenius_norm().powi(2)));
            total += 1;
            if r <= 1e-9 {
                passed += 1;
            }
        }
        instances.push((h, p));
    }

    // 10^4-step trajectories on every tenth instance plus a ramp through the EP.
    let times = uniform_times(0.0, 1.0, 10_000).unwrap();
    let mut worst_drift = 0.0f64;
    let mut trajectories = 0;
    for (i, (h, p)) in instances.iter().enumerate().step_by(10) {
        let psi0 = (0..)
            .map(|k| random_state(h.dim(), (i + 1000 * k) as u64))
            .find(|v| {
                let q: C64 = v
                    .iter()
                    .zip(&p.matrix().matvec(v))
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                q.norm() >= 0.1
            })
            .unwrap();
        let h = h.clone();
        let tr = evolve(move |_| h.clone(), &psi0, &times, p).unwrap();
        worst_drift = worst_drift.max(tr.pseudo_norm_drift());
        trajectories += 1;
    }
    let ramp = evolve(
        |t| toy(1.0, 0.2 + 1.6 * t),
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        &times,
        &Involution::sigma3(),
    )
    .unwrap();
    worst_drift = worst_drift.max(ramp.pseudo_norm_drift());
    trajectories += 1;

    let mut control_hits = 0;
    for seed in 0..200u64 {
        let n = [2usize, 4, 6][seed as usize % 3];
        let p = Involution::alternating(n).unwrap();
        let u = propagator(&random_matrix(n, seed).unwrap(), 1.0).unwrap();
        if check_pseudounitarity(&u, &p).unwrap() > 1e-3 {
            control_hits += 1;
        }
    }

    let unitary_ok = passed == total;
    let drift_ok = worst_drift <= 1e-8;
    let control_ok = control_hits * 100 >= 99 * 200;
    outcome(
        regimes_ok && unitary_ok && drift_ok && control_ok,
        format!(
            "regimes as labelled: {regimes_ok}; residual <= 1e-9 in {passed}/{total} (worst at t = 0.1, 1, 5: {:.1e}, {:.1e}, {:.1e}; \
             worst residual / (eps |U|_F^2) = {worst_floor:.2}); drift over {trajectories} trajectories {worst_drift:.1e}; \
             control above 1e-3 in {control_hits}/200",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_7() -> Outcome {
    let h = toy(1.0, 2.0);
    let psi0 = random_state(2, 0);
    let times = uniform_times(0.0, 2.0, 2000).unwrap();
    let tr = evolve(|_| h.clone(), &psi0, &times, &Involution::sigma3()).unwrap();
    let norms = tr.norms();
    let growth = norms[norms.len() - 1] / norms[0];
    let drift = tr.pseudo_norm_drift();
    outcome(
        growth >= 10.0 && drift <= 1e-10,
        format!("|psi(2)| / |psi(0)| = {growth:.2}, relative pseudo-norm drift {drift:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let s3 = Involution::sigma3();
    let mut structure = 0.0f64;
    let mut rel = 0.0f64;
    let mut abs = 0.0f64;
    for i in 0..10_000 {
        let k = 100.0 * i as f64 / 9_999.0;
        let b = fv_block(k).matrix;
        structure = structure.max((&b - &s3.conjugate(&b.adjoint())).max_abs());
        let ev = eig(&b, 1e-10).unwrap().eigenvalues;
        let (lo, hi) = dispersion(k);
        let err = (ev[0] - C64::new(hi, 0.0))
            .norm()
            .max((ev[1] - C64::new(lo, 0.0)).norm());
        abs = abs.max(err);
        rel = rel.max(err / omega(k));
    }
    outcome(
        structure == 0.0 && rel <= 1e-12,
        format!(
            "10^4 momenta, |B - s3 B† s3| = {structure:e}, eigenvalue error relative to omega {rel:.1e} (absolute {abs:.1e})"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst_drift = 0.0f64;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = MomentumGrid::symmetric(8.0, 256).unwrap();
        let g1 = FvState::gaussian(
            grid.clone(),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.3..1.0),
            rng.gen_range(-5.0..5.0),
        )
        .unwrap();
        let g2 = FvState::gaussian(
            grid.clone(),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.3..1.0),
            rng.gen_range(-5.0..5.0),
        )
        .unwrap();
        // Mix in a negative-frequency component so both φ and χ are populated.
        let chi: Vec<C64> = g2.phi.iter().map(|z| z.scale(0.4)).collect();
        let s0 = FvState::new(grid, g1.phi.clone(), chi).unwrap();
        let run = fv_evolve_strided(&s0, 10.0, 10_000, 10_000).unwrap();
        worst_drift = worst_drift.max(run.charge_drift());
    }
    let modes = [
        (0.0, C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        (1.3, C64::new(0.4, -0.2), C64::new(0.1, 0.9)),
        (7.5, C64::new(-1.0, 0.5), C64::new(2.0, 0.0)),
    ];
    let worst_kg = modes
        .iter()
        .map(|&(k, p, d)| kg_consistency(p, d, k, 20.0, 4000).unwrap())
        .fold(0.0, f64::max);
    outcome(
        worst_drift <= 1e-10 && worst_kg <= 1e-10,
        format!("charge drift over 5 packets x 10^4 steps {worst_drift:.1e}; Klein-Gordon residual on k = 0, 1.3, 7.5: {worst_kg:.1e}"),
    )
}

fn run_cli(args: &[&str], dir: &Path, threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_pseudoherm"))
        .args(args)
        .current_dir(dir)
        .env("PSEUDOHERM_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut bytes = out.stdout;
    let mut names: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    for path in names {
        bytes.extend(path.file_name().unwrap().to_string_lossy().as_bytes());
        bytes.extend(fs::read(&path).unwrap());
        fs::remove_file(path).unwrap();
    }
    bytes
}

fn criterion_10() -> Outcome {
    let scratch = tempfile::tempdir().unwrap();
    let matrix = scratch.path().join("h.json");
    let p4 = Involution::alternating(4).unwrap();
    fs::write(
        &matrix,
        to_json_string(&matrix_json(&dressed_real_spectrum(4, 3, &p4))),
    )
    .unwrap();
    let m = matrix.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["classify", "--a", "1", "--b", "0.5"],
        vec!["classify", "--matrix", m, "--format", "json"],
        vec!["spectrum", "--a", "1", "--b", "2"],
        vec![
            "metric", "--matrix", m, "--signs", "1,-1,1,1", "--format", "json",
        ],
        vec!["metric-profile", "--n", "100"],
        vec![
            "evolve", "--a", "1", "--b", "0.5", "--b-end", "1.5", "--steps", "500", "--seed", "7",
        ],
        vec![
            "evolve", "--matrix", m, "--steps", "200", "--format", "json", "--seed", "3",
        ],
        vec!["sweep", "--n", "301"],
        vec!["locate-ep", "--a", "1", "--b-lo", "0", "--b-hi", "2"],
        vec!["fv-dispersion", "--k-max", "100", "--n", "1000"],
        vec![
            "fv-evolve",
            "--packet",
            "random",
            "--seed",
            "5",
            "--steps",
            "200",
            "--out",
            "final.csv",
            "--charge-out",
            "q.csv",
            "--position-out",
            "x.csv",
        ],
        vec!["kg-check", "--k", "2", "--psi-dot0", "0,1"],
    ];
    let mut identical = 0;
    for args in &commands {
        let work = tempfile::tempdir().unwrap();
        let first = run_cli(args, work.path(), "0");
        let again = run_cli(args, work.path(), "0");
        let serial = run_cli(args, work.path(), "1");
        if first == again && first == serial && !first.is_empty() {
            identical += 1;
        } else {
            println!("    not reproducible: {args:?}");
        }
    }

    // Matrix JSON round trips, including the metric the CLI writes.
    let mut round_trips = 0;
    let mut trials = 0;
    for seed in 0..50u64 {
        let n = 1 + seed as usize % 6;
        let h = random_matrix(n, seed)
            .unwrap()
            .scale_real(10f64.powi(seed as i32 % 7 - 3));
        let text = to_json_string(&matrix_json(&h));
        trials += 1;
        if parse_matrix_str(&text, &matrix).unwrap() == h {
            round_trips += 1;
        }
    }
    let work = tempfile::tempdir().unwrap();
    let out = run_cli(
        &["metric", "--a", "1", "--b", "0.7", "--format", "json"],
        work.path(),
        "0",
    );
    let from_cli = parse_matrix_str(std::str::from_utf8(&out).unwrap(), &matrix).unwrap();
    trials += 1;
    if from_cli == build_metric(&toy(1.0, 0.7), &[1, 1], 1e-10).unwrap().eta {
        round_trips += 1;
    }

    outcome(
        identical == commands.len() && round_trips == trials,
        format!(
            "{identical}/{} command configurations byte-identical across reruns and thread counts; {round_trips}/{trials} exact matrix round trips",
            commands.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("closed-form toy spectrum", criterion_1),
        ("three-regime phase diagram", criterion_2),
        ("conjugate pairing", criterion_3),
        ("metric construction", criterion_4),
        ("metric singularity", criterion_5),
        ("pseudo-unitarity", criterion_6),
        ("broken-phase growth", criterion_7),
        ("Feshbach-Villars structure", criterion_8),
        ("Feshbach-Villars dynamics", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict}: {name}: {} [{:.1}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
