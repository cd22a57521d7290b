use proptest::prelude::*;
use pseudoherm_core::fv::{
    charge, dispersion, fv_block, fv_evolve, fv_evolve_strided, fv_to_kg, kg_consistency, kg_to_fv,
    omega, Branch, FvState, MomentumGrid,
};
use pseudoherm_core::linalg::eig;
use pseudoherm_core::pt_algebra::{is_pseudo_hermitian, Involution};
use pseudoherm_core::spectral::{classify, ClassifyTolerances, Phase};
use pseudoherm_core::C64;

fn amp() -> impl Strategy<Value = C64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(r, i)| C64::new(r, i))
}

proptest! {
    #[test]
    fn block_is_sigma3_pseudo_hermitian(k in -100.0..100.0f64) {
        let b = fv_block(k).matrix;
        let s3 = Involution::sigma3();
        let diff = &b - &s3.conjugate(&b.adjoint());
        prop_assert_eq!(diff.max_abs(), 0.0);
        prop_assert!(is_pseudo_hermitian(&b, &s3, 1e-15).unwrap().holds);
        prop_assert!(b.is_real());
        prop_assert_eq!(b.trace(), C64::new(0.0, 0.0));
    }

    #[test]
    fn eigenvalues_follow_dispersion(k in 0.0..100.0f64) {
        let sys = eig(&fv_block(k).matrix, 1e-10).unwrap();
        let (lo, hi) = dispersion(k);
        let w = omega(k);
        prop_assert!((sys.eigenvalues[0] - C64::new(hi, 0.0)).norm() <= 1e-12 * w);
        prop_assert!((sys.eigenvalues[1] - C64::new(lo, 0.0)).norm() <= 1e-12 * w);
    }

    #[test]
    fn blocks_are_unbroken(k in -50.0..50.0f64) {
        let r = classify(&fv_block(k).matrix, &ClassifyTolerances::default()).unwrap();
        prop_assert_eq!(r.phase, Phase::AllReal);
    }

    #[test]
    fn kg_round_trip(psi in amp(), psi_dot in amp(), k in -10.0..10.0f64) {
        let grid = MomentumGrid::single(k).unwrap();
        let s = kg_to_fv(grid, &[psi], &[psi_dot]).unwrap();
        let (p2, d2) = fv_to_kg(&s);
        prop_assert!((p2[0] - psi).norm() <= 1e-15 * (1.0 + psi.norm() + psi_dot.norm()));
        prop_assert!((d2[0] - psi_dot).norm() <= 1e-15 * (1.0 + psi.norm() + psi_dot.norm()));
    }

    #[test]
    fn charge_is_conserved(seed in any::<u64>(), t in 0.1..20.0f64) {
        let grid = MomentumGrid::symmetric(5.0, 32).unwrap();
        let s0 = FvState::random(grid, seed).unwrap();
        let run = fv_evolve_strided(&s0, t, 500, 500).unwrap();
        // Random (φ, χ) can have Q close to zero; scale the drift by the norm instead.
        let q0 = run.charges[0];
        let worst = run.charges.iter().map(|q| (q - q0).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12 * s0.norm_sqr(), "drift {worst:e}");
        if q0.abs() >= 1e-2 * s0.norm_sqr() {
            prop_assert!(run.charge_drift() <= 1e-10);
        }
    }

    #[test]
    fn single_modes_match_klein_gordon(psi in amp(), psi_dot in amp(), k in -5.0..5.0f64) {
        let r = kg_consistency(psi, psi_dot, k, 10.0, 500).unwrap();
        prop_assert!(r <= 1e-12 * (psi.norm() + psi_dot.norm() / omega(k)).max(1.0) * 10.0, "residual {r:e}");
    }
}

#[test]
fn eigenmodes_only_rotate() {
    let grid = MomentumGrid::uniform(0.0, 4.0, 5).unwrap();
    for (idx, branch) in [
        (0, Branch::Positive),
        (2, Branch::Negative),
        (4, Branch::Positive),
    ] {
        let s0 = FvState::plane_wave(grid.clone(), idx, branch).unwrap();
        let run = fv_evolve(&s0, 7.0, 1000).unwrap();
        let w = omega(grid.k_values()[idx]);
        let sign = if branch == Branch::Positive {
            -1.0
        } else {
            1.0
        };
        for (s, &i) in run.states.iter().zip(&run.recorded_steps) {
            let phase = C64::from_polar(1.0, sign * w * run.times[i]);
            assert!((s.phi[idx] - s0.phi[idx] * phase).norm() <= 1e-11);
            assert!((s.phi[idx].norm() - s0.phi[idx].norm()).abs() <= 1e-12);
            assert!((s.chi[idx].norm() - s0.chi[idx].norm()).abs() <= 1e-12);
        }
    }
}

#[test]
fn gaussian_packet_charge_over_many_steps() {
    let grid = MomentumGrid::symmetric(8.0, 256).unwrap();
    let s0 = FvState::gaussian(grid, 1.5, 0.7, -3.0).unwrap();
    let run = fv_evolve_strided(&s0, 10.0, 10_000, 1000).unwrap();
    assert!(
        run.charge_drift() <= 1e-10,
        "drift {:e}",
        run.charge_drift()
    );
    assert_eq!(run.recorded_steps.len(), 11);
}

#[test]
fn ordinary_norm_varies_for_mixed_states() {
    let grid = MomentumGrid::symmetric(3.0, 16).unwrap();
    let s0 = FvState::random(grid, 99).unwrap();
    let run = fv_evolve(&s0, 5.0, 500).unwrap();
    let norms: Vec<f64> = run.states.iter().map(|s| s.norm_sqr()).collect();
    let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().cloned().fold(0.0, f64::max);
    assert!((hi - lo) / norms[0] >= 1e-3);
    let q: Vec<f64> = run.states.iter().map(charge).collect();
    assert!(q.iter().all(|x| (x - q[0]).abs() <= 1e-10 * q[0].abs()));
}

#[test]
fn rest_frame_oscillation() {
    assert!(
        kg_consistency(C64::new(1.0, 0.0), C64::new(0.0, 0.0), 0.0, 20.0, 4000).unwrap() <= 1e-10
    );
}
