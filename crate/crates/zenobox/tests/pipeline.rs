//! End-to-end crossover of the damped eigensum, independent of the presets.

use zenobox::synth::synthesize;
use zenobox_core::fractal::{
    crossover_scale, log_spaced_offsets, structure_function_spatial, Quantity,
};
use zenobox_core::propagators::{evolve_spectral, project_constant_state, ZenoDamping};
use zenobox_core::zeno::{eigenmode_cutoff, zeno_smoothing_scale, ZenoSchedule};
use zenobox_core::KernelParams;

fn knee_ratio(projections: u64) -> f64 {
    let p = KernelParams::natural();
    let t = p.irrational_time();
    let modes = 8192;
    let schedule = ZenoSchedule::over_total_time(t, projections, modes).unwrap();
    assert!(eigenmode_cutoff(&schedule, &p) < modes as f64 / 8.0);
    let start = project_constant_state(modes, &p).unwrap();
    let state = evolve_spectral(
        &start,
        t,
        Some(ZenoDamping::new(projections as f64).unwrap()),
    )
    .unwrap();
    let intervals = 1 << 16;
    let field = synthesize(&state, intervals).unwrap();
    let offsets = log_spaced_offsets(2, intervals / 16, 48);
    let sf = structure_function_spatial(&field, &offsets, Quantity::Complex).unwrap();
    let knee = crossover_scale(&sf).unwrap();
    knee.scale / zeno_smoothing_scale(&schedule, &p)
}

#[test]
fn damped_eigensum_knee_tracks_mode_cutoff() {
    // The knee sits a roughly fixed multiple of L/(π n_cut), measured at
    // 3.4–4.3 for N = 100–400; outside the factor 2 of the estimate.
    let ratios: Vec<f64> = [100, 200, 400].iter().map(|&n| knee_ratio(n)).collect();
    for r in &ratios {
        assert!((3.0..5.0).contains(r), "{ratios:?}");
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1.6, "{ratios:?}");
}
