use std::fmt::Write;

use rayon::prelude::*;
use zenobox_core::fractal::{crossover_scale, Crossover, Quantity};
use zenobox_core::propagators::{evolve_spectral, project_constant_state, WaveField, ZenoDamping};
use zenobox_core::zeno::{
    gmn_matrix_with_tol, projected_step_field, remainder_fit_from_matrices, zeno_evolve,
    zeno_limit_deviation, RemainderReference, ZenoSchedule,
};
use zenobox_core::{Error as CoreError, KernelParams, SpectralState};

use super::{log_space, loglog_slope, series, spatial_structure, Context, RunOutput};
use crate::config::{
    spatial_offsets, EpsilonEquivalence, SmalltRemainder, ZenoCutoff, ZenoSurvival,
};
use crate::error::Result;
use crate::record::SeriesPoint;
use crate::synth::synthesize;

pub(crate) fn smallt(cx: &Context, p: &SmalltRemainder) -> Result<RunOutput> {
    let kp = cx.physics.kernel(0.0)?;
    let dts = log_space(p.dt_min, p.dt_max, p.points);
    let assemble = |modes: usize| -> Result<Vec<_>> {
        Ok(dts
            .par_iter()
            .map(|&dt| gmn_matrix_with_tol(&ZenoSchedule::new(dt, 1, modes)?, &kp, p.quad_tol))
            .collect::<Result<Vec<_>, _>>()?)
    };
    let mats = assemble(p.modes)?;
    let first = remainder_fit_from_matrices(&kp, &mats, RemainderReference::FirstOrder)?;
    let ident = remainder_fit_from_matrices(&kp, &mats, RemainderReference::Identity)?;
    let compare = match p.compare_modes {
        Some(m) => Some(remainder_fit_from_matrices(
            &kp,
            &assemble(m)?,
            RemainderReference::FirstOrder,
        )?),
        None => None,
    };

    let records = dts
        .iter()
        .enumerate()
        .map(|(i, &dt)| {
            let mut r = cx
                .record(i)
                .param("dt", dt)
                .value("remainder_first_order", first.norms[i])
                .value("remainder_identity", ident.norms[i])
                .value("quad_error", mats[i].error_estimate);
            if let Some(c) = &compare {
                r = r.value("remainder_compare", c.norms[i]);
            }
            r
        })
        .collect();
    let mut summary = cx
        .record(0)
        .param("modes", p.modes as f64)
        .value("slope_first_order", first.slope)
        .value("rms_first_order", first.fit.rms)
        .value("slope_identity", ident.slope)
        .value("rms_identity", ident.fit.rms);
    if let (Some(c), Some(m)) = (&compare, p.compare_modes) {
        summary = summary
            .value("compare_modes", m as f64)
            .value("slope_compare", c.slope)
            .value("slope_shift", (c.slope - first.slope).abs());
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "smallt-remainder: M = {}, {} intervals in [{:.3e}, {:.3e}]",
        p.modes, p.points, p.dt_min, p.dt_max
    );
    let _ = writeln!(
        report,
        "  ‖G − (1 − iΔtH/ħ)‖ exponent {:.4} (rms {:.3e})",
        first.slope, first.fit.rms
    );
    let _ = writeln!(report, "  ‖G − 1‖ exponent {:.4}", ident.slope);
    if let (Some(c), Some(m)) = (&compare, p.compare_modes) {
        let _ = writeln!(report, "  M = {m}: exponent {:.4}", c.slope);
    }
    let mut pts: Vec<SeriesPoint> = Vec::new();
    for (curve, fit) in [("first-order", &first), ("identity", &ident)] {
        pts.extend(fit.dts.iter().zip(&fit.norms).map(|(&x, &y)| SeriesPoint {
            curve: curve.to_string(),
            x,
            y,
        }));
    }
    Ok(RunOutput {
        experiment: cx.experiment,
        records,
        summary: vec![summary],
        series: pts,
        report,
    })
}

pub(crate) fn survival(cx: &Context, p: &ZenoSurvival) -> Result<RunOutput> {
    let kp = cx.physics.kernel(0.0)?;
    let state = SpectralState::eigenmode(p.initial_mode, p.modes, kp)?;
    let rows = p
        .projections
        .par_iter()
        .map(|&n| -> Result<(f64, f64, f64, f64)> {
            let schedule = ZenoSchedule::over_total_time(p.total_time, n, p.modes)?;
            let g = gmn_matrix_with_tol(&schedule, &kp, p.quad_tol)?;
            let traj = zeno_evolve(&state, &g, &schedule, &[])?;
            let surv = traj.survival[n as usize];
            let dev = zeno_limit_deviation(&g, &schedule, &kp, p.limit_block);
            Ok((schedule.dt, surv, dev, g.error_estimate))
        })
        .collect::<Result<Vec<_>>>()?;

    let ns: Vec<f64> = p.projections.iter().map(|&n| n as f64).collect();
    let deficits: Vec<f64> = rows.iter().map(|r| 1.0 - r.1).collect();
    let (slope, intercept, used) = loglog_slope(&ns, &deficits);
    let devs: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let last_dev = *devs.last().expect("validated non-empty");

    let records = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            cx.record(i)
                .param("projections", ns[i])
                .param("dt", r.0)
                .value("survival", r.1)
                .value("deficit", deficits[i])
                .value("limit_deviation", r.2)
                .value("quad_error", r.3)
        })
        .collect();
    let summary = cx
        .record(0)
        .param("total_time", p.total_time)
        .param("modes", p.modes as f64)
        .value("deficit_slope", slope)
        .value("deficit_prefactor", intercept.exp())
        .value("fit_points", used as f64)
        .value("limit_monotone", if monotone { 1.0 } else { 0.0 })
        .value("limit_deviation_final", last_dev);

    let mut report = String::new();
    let _ = writeln!(
        report,
        "zeno-survival: T = {}, M = {}, start in mode {}",
        p.total_time, p.modes, p.initial_mode
    );
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            report,
            "  N = {:>6}: survival {:.10}, deficit {:.4e}, ‖G^N − e^(−iTH)‖ = {:.4e}",
            ns[i], r.1, deficits[i], r.2
        );
    }
    let _ = writeln!(
        report,
        "  deficit ∝ N^{slope:.4}; Zeno-limit deviation monotone: {monotone}"
    );
    let mut pts: Vec<SeriesPoint> = ns
        .iter()
        .zip(&deficits)
        .map(|(&x, &y)| SeriesPoint {
            curve: "deficit".into(),
            x,
            y,
        })
        .collect();
    pts.extend(ns.iter().zip(&devs).map(|(&x, &y)| SeriesPoint {
        curve: "limit-deviation".into(),
        x,
        y,
    }));
    Ok(RunOutput {
        experiment: cx.experiment,
        records,
        summary: vec![summary],
        series: pts,
        report,
    })
}

/// Crossover of `state` on the grid, or None with a single-regime report.
fn knee(
    state: &SpectralState,
    intervals: usize,
    offsets: &[usize],
) -> Result<(Option<Crossover>, zenobox_core::fractal::StructureFunction)> {
    knee_of_field(&synthesize(state, intervals)?, offsets)
}

fn knee_of_field(
    field: &WaveField,
    offsets: &[usize],
) -> Result<(Option<Crossover>, zenobox_core::fractal::StructureFunction)> {
    let sf = spatial_structure(field, offsets, Quantity::Complex)?;
    match crossover_scale(&sf) {
        Ok(c) => Ok((Some(c), sf)),
        Err(CoreError::SingleRegime { .. }) => Ok((None, sf)),
        Err(e) => Err(e.into()),
    }
}

fn smoothing_scale(kp: &KernelParams, dt: f64) -> f64 {
    kp.hbar * dt / (2.0 * kp.mass * kp.box_length)
}

pub(crate) fn cutoff(cx: &Context, p: &ZenoCutoff) -> Result<RunOutput> {
    let ph = cx.physics;
    let kp = ph.kernel(0.0)?;
    let t = p.time.unwrap_or_else(|| ph.irrational_time());
    let initial = project_constant_state(p.modes, &kp)?;
    let offsets = spatial_offsets(p.grid_intervals, p.scale_max, p.scales)?;
    let l = ph.box_length;
    let mut records = Vec::new();
    let mut pts = Vec::new();
    let mut stars = Vec::new();
    let mut report = String::new();
    let _ = writeln!(
        report,
        "zeno-cutoff: T = {t:.6}, M = {}, grid = {}",
        p.modes, p.grid_intervals
    );
    for (i, &dt) in p.dts.iter().enumerate() {
        let damping = ZenoDamping::from_interval(dt, t)?;
        let state = evolve_spectral(&initial, t, Some(damping))?;
        let (cross, sf) = knee(&state, p.grid_intervals, &offsets)?;
        let predicted = smoothing_scale(&kp, dt);
        let n_cut = 2.0 * ph.mass * l * l / (std::f64::consts::PI * ph.hbar * dt);
        let mut r = cx
            .record(i)
            .param("dt", dt)
            .param("projections", t / dt)
            .value("eigenmode_cutoff", n_cut)
            .value("predicted_scale", predicted);
        match cross {
            Some(c) => {
                r = r
                    .value("delta_star", c.scale)
                    .value("ratio", c.scale / predicted)
                    .value("slope_small", c.slope_small)
                    .value("slope_large", c.slope_large);
                let _ = writeln!(
                    report,
                    "  Δt = {dt:.3e}: Δ* = {:.4e}, (ħ/2mL)Δt = {predicted:.4e}, ratio {:.3}, slopes {:.3} | {:.3}",
                    c.scale,
                    c.scale / predicted,
                    c.slope_small,
                    c.slope_large
                );
                stars.push(c.scale);
            }
            None => {
                r = r
                    .value("delta_star", f64::NAN)
                    .value("ratio", f64::NAN)
                    .value("slope_small", f64::NAN)
                    .value("slope_large", f64::NAN)
                    .flag("single-regime");
                let _ = writeln!(report, "  Δt = {dt:.3e}: single scaling regime");
                stars.push(f64::NAN);
            }
        }
        records.push(r);
        pts.extend(series(&format!("dt={dt:e}"), &sf));
    }
    let (slope, _, used) = loglog_slope(&p.dts, &stars);
    let ratios: Vec<f64> = p
        .dts
        .iter()
        .zip(&stars)
        .filter(|(_, s)| s.is_finite())
        .map(|(&dt, &s)| s / smoothing_scale(&kp, dt))
        .collect();
    let geo = if ratios.is_empty() {
        f64::NAN
    } else {
        (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp()
    };
    let within = ratios.iter().filter(|&&r| (0.5..=2.0).contains(&r)).count();
    let mut summary = cx
        .record(0)
        .param("time", t)
        .value("slope", slope)
        .value("fit_points", used as f64)
        .value("ratio_geometric_mean", geo)
        .value("ratio_min", ratios.iter().cloned().fold(f64::NAN, f64::min))
        .value("ratio_max", ratios.iter().cloned().fold(f64::NAN, f64::max))
        .value("within_factor_two", within as f64);
    if used < 2 {
        summary = summary.flag("too-few-knees");
    }
    let _ = writeln!(
        report,
        "  Δ* ∝ Δt^{slope:.4}; Δ*/((ħ/2mL)Δt) geometric mean {geo:.3}, {within}/{} within a factor of 2",
        ratios.len()
    );
    Ok(RunOutput {
        experiment: cx.experiment,
        records,
        summary: vec![summary],
        series: pts,
        report,
    })
}

pub(crate) fn equivalence(cx: &Context, p: &EpsilonEquivalence) -> Result<RunOutput> {
    let ph = cx.physics;
    let kp = ph.kernel(0.0)?;
    let t = p.total_time;
    let n = p.projections;
    let schedule = ZenoSchedule::over_total_time(t, n, p.modes)?;
    let initial = project_constant_state(p.modes, &kp)?;
    let g = gmn_matrix_with_tol(&schedule, &kp, p.quad_tol)?;
    let traj = zeno_evolve(&initial, &g, &schedule, &[n - 1, n])?;
    let mut states = traj.checkpoints.into_iter().map(|(_, s)| s);
    let before_last = states.next().expect("checkpoint requested");
    let mut matrix_state = states.next().expect("checkpoint requested");
    matrix_state.params = kp.with_time(t);
    // last free step left unprojected so the wall jump is not re-imposed
    let matrix_field = projected_step_field(&before_last, schedule.dt, p.grid_intervals + 1)?;
    let surrogate = evolve_spectral(&initial, t, Some(ZenoDamping::new(n as f64)?))?;
    let surrogate_field = synthesize(&surrogate, p.grid_intervals)?;
    let offsets = spatial_offsets(p.grid_intervals, p.scale_max, p.scales)?;
    let predicted = smoothing_scale(&kp, schedule.dt);

    let mut records = Vec::new();
    let mut pts = Vec::new();
    let mut stars = Vec::new();
    let mut report = String::new();
    let _ = writeln!(
        report,
        "epsilon-equivalence: T = {t}, N = {n}, Δt = {:.4e}, M = {}, grid = {}",
        schedule.dt, p.modes, p.grid_intervals
    );
    let routes = [
        ("matrix", &matrix_state, &matrix_field),
        ("surrogate", &surrogate, &surrogate_field),
    ];
    for (i, (route, state, field)) in routes.into_iter().enumerate() {
        let (cross, sf) = knee_of_field(field, &offsets)?;
        let mut r = cx
            .record(i)
            .param("route", i as f64)
            .value("norm", state.norm_sqr())
            .value("predicted_scale", predicted)
            .flag(route);
        match cross {
            Some(c) => {
                r = r
                    .value("delta_star", c.scale)
                    .value("slope_small", c.slope_small)
                    .value("slope_large", c.slope_large);
                let _ = writeln!(
                    report,
                    "  {route:>9}: Δ* = {:.4e}, slopes {:.3} | {:.3}, norm {:.6}",
                    c.scale,
                    c.slope_small,
                    c.slope_large,
                    state.norm_sqr()
                );
                stars.push(c.scale);
            }
            None => {
                r = r
                    .value("delta_star", f64::NAN)
                    .value("slope_small", f64::NAN)
                    .value("slope_large", f64::NAN)
                    .flag("single-regime");
                let _ = writeln!(report, "  {route:>9}: single scaling regime");
                stars.push(f64::NAN);
            }
        }
        records.push(r);
        pts.extend(series(route, &sf));
    }
    let ratio = stars[0] / stars[1];
    let agree = ratio.is_finite() && (0.5..=2.0).contains(&ratio);
    // coefficient profiles: relative ℓ² distance of |c_n|
    let (mut diff, mut total) = (0.0, 0.0);
    for (a, b) in matrix_state.coeffs.iter().zip(&surrogate.coeffs) {
        diff += (a.norm() - b.norm()).powi(2);
        total += b.norm_sqr();
    }
    let summary = cx
        .record(0)
        .param("total_time", t)
        .param("projections", n as f64)
        .value("delta_star_ratio", ratio)
        .value("agree_within_factor_two", if agree { 1.0 } else { 0.0 })
        .value("profile_distance", (diff / total).sqrt())
        .value("quad_error", g.error_estimate);
    let _ = writeln!(report, "  Δ*(matrix)/Δ*(surrogate) = {ratio:.3}");
    Ok(RunOutput {
        experiment: cx.experiment,
        records,
        summary: vec![summary],
        series: pts,
        report,
    })
}
