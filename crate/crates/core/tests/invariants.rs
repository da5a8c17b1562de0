use proptest::prelude::*;
use zenobox_core::numerics::{theta3_modular_residual, theta3_quasiperiod_residual};
use zenobox_core::propagators::{
    evolve_spectral, project_constant_state, SpectralState, ZenoDamping,
};
use zenobox_core::zeno::{gmn_matrix, zeno_evolve, ZenoSchedule};
use zenobox_core::{Complex64, KernelParams};

fn state(coeffs: Vec<(f64, f64)>) -> SpectralState {
    let c = coeffs
        .into_iter()
        .map(|(a, b)| Complex64::new(a, b))
        .collect();
    SpectralState::new(c, KernelParams::natural()).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..200)
}

proptest! {
    #[test]
    fn undamped_evolution_preserves_norm(c in coeffs(), t in 0.0f64..50.0) {
        let s = state(c);
        let e = evolve_spectral(&s, t, None).unwrap();
        prop_assert!((e.norm_sqr() - s.norm_sqr()).abs() <= 1e-13 * s.norm_sqr().max(1.0));
        for (a, b) in s.coeffs.iter().zip(&e.coeffs) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn evolution_is_a_group(c in coeffs(), t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let s = state(c);
        let two = evolve_spectral(&evolve_spectral(&s, t1, None).unwrap(), t2, None).unwrap();
        let one = evolve_spectral(&s, t1 + t2, None).unwrap();
        // phases ω n² (t₁ + t₂) are wrapped separately; agreement is to rounding
        let n = s.modes() as f64;
        for (a, b) in two.coeffs.iter().zip(&one.coeffs) {
            prop_assert!((a - b).norm() <= 1e-15 * n * n * (t1 + t2).max(1.0) * 50.0);
        }
        prop_assert!((two.params.time - one.params.time).abs() < 1e-12);
    }

    #[test]
    fn damping_never_increases_norm(c in coeffs(), t in 0.01f64..2.0, n in 1.0f64..1e4) {
        let s = state(c);
        let d = evolve_spectral(&s, t, Some(ZenoDamping::new(n).unwrap())).unwrap();
        prop_assert!(d.norm_sqr() <= s.norm_sqr() * (1.0 + 1e-14));
    }

    #[test]
    fn theta_identities_hold(
        zr in -3.2f64..3.2, zi in -0.5f64..0.5, sr in -1.0f64..1.0, si in 0.05f64..2.0,
    ) {
        let z = Complex64::new(zr, zi);
        let s = Complex64::new(sr, si);
        prop_assert!(theta3_quasiperiod_residual(z, s, 1e-16).unwrap() < 1e-10);
        prop_assert!(theta3_modular_residual(z, s).unwrap() < 1e-10);
    }
}

#[test]
fn projections_only_lose_probability() {
    let p = KernelParams::natural();
    let schedule = ZenoSchedule::over_total_time(0.1, 12, 16).unwrap();
    let g = gmn_matrix(&schedule, &p).unwrap();
    let start = project_constant_state(16, &p).unwrap();
    let traj = zeno_evolve(&start, &g, &schedule, &[12]).unwrap();
    assert_eq!(traj.survival.len(), 13);
    assert!((traj.survival[0] - start.norm_sqr()).abs() < 1e-15);
    for w in traj.survival.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} then {}", w[0], w[1]);
    }
    assert!(traj.survival[12] < traj.survival[0]);
}
