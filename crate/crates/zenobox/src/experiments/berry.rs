use std::f64::consts::PI;
use std::fmt::Write;

use zenobox_core::fractal::{
    beta_from_spectrum, fit_dimension, log_spaced_offsets, structure_function_temporal, TimeSeries,
};
use zenobox_core::propagators::{evolve_spectral, project_constant_state};

use super::{series, spatial_structure, Context, RunOutput};
use crate::config::{highest_odd, spatial_offsets, BerrySpatial, BerryTemporal};
use crate::error::Result;
use crate::synth::{revival_series, synthesize};

pub(crate) fn spatial(cx: &Context, p: &BerrySpatial) -> Result<RunOutput> {
    let ph = cx.physics;
    let l = ph.box_length;
    let t = p.time.unwrap_or_else(|| ph.irrational_time());
    let initial = project_constant_state(p.modes, &ph.kernel(0.0)?)?;
    let state = evolve_spectral(&initial, t, None)?;
    let field = synthesize(&state, p.grid_intervals)?;
    let offsets = spatial_offsets(p.grid_intervals, 0.125, p.scales)?;
    let sf = spatial_structure(&field, &offsets, p.quantity.into())?;
    let window = (p.window_lo * l / (PI * p.modes as f64), p.window_hi * l);
    let fit = fit_dimension(&sf, window)?;
    let beta = beta_from_spectrum(&state.coeffs)?;
    let gap = (fit.dimension - beta.dimension).abs();

    let record = cx
        .record(0)
        .param("time", t)
        .param("modes", p.modes as f64)
        .param("grid_intervals", p.grid_intervals as f64)
        .param("window_lo", window.0)
        .param("window_hi", window.1)
        .value("slope", fit.slope)
        .value("dimension", fit.dimension)
        .value("residual", fit.residual)
        .value("fit_points", fit.points as f64)
        .value("beta", beta.beta)
        .value("beta_dimension", beta.dimension)
        .value("dimension_gap", gap)
        .value("grid_norm", field.norm_sqr());

    let mut report = String::new();
    let _ = writeln!(
        report,
        "berry-spatial: t = {t:.6}, M = {}, grid = {}",
        p.modes, p.grid_intervals
    );
    let _ = writeln!(
        report,
        "  window [{:.3e}, {:.3e}] ({} scales): slope {:.4}, D = {:.4} (rms {:.3e})",
        window.0, window.1, fit.points, fit.slope, fit.dimension, fit.residual
    );
    let _ = writeln!(
        report,
        "  spectrum: beta = {:.4}, D = (5 - beta)/2 = {:.4}, |ΔD| = {gap:.4}",
        beta.beta, beta.dimension
    );
    Ok(RunOutput {
        experiment: cx.experiment,
        records: vec![record],
        summary: Vec::new(),
        series: series("S", &sf),
        report,
    })
}

pub(crate) fn temporal(cx: &Context, p: &BerryTemporal) -> Result<RunOutput> {
    let ph = cx.physics;
    let kp = ph.kernel(0.0)?;
    let x = p.x.unwrap_or(ph.box_length / 5f64.sqrt());
    let state = project_constant_state(p.modes, &kp)?;
    let period = kp.revival_time();
    let dt = period / p.resolution as f64;
    let start = p.start.unwrap_or_else(|| ph.irrational_time());
    // first sample index, wrapped into one period
    let j0 = ((start / period).fract() * p.resolution as f64).floor() as usize % p.resolution;
    let full = revival_series(&state, x, p.resolution)?;
    let values = (0..p.samples)
        .map(|j| full[(j0 + j) % p.resolution])
        .collect();
    let ts = TimeSeries {
        x,
        dt,
        values,
        periodic: p.samples == p.resolution,
    };
    let offsets = log_spaced_offsets(2, p.samples / 8, p.scales);
    let sf = structure_function_temporal(&ts, &offsets, p.quantity.into())?;
    let top = highest_odd(p.modes) as f64;
    let window = (
        p.window_lo * period / (top * top),
        p.window_hi * p.samples as f64 * dt,
    );
    let fit = fit_dimension(&sf, window)?;

    let record = cx
        .record(0)
        .param("x", x)
        .param("modes", p.modes as f64)
        .param("resolution", p.resolution as f64)
        .param("samples", p.samples as f64)
        .param("start", j0 as f64 * dt)
        .param("window_lo", window.0)
        .param("window_hi", window.1)
        .value("slope", fit.slope)
        .value("dimension", fit.dimension)
        .value("residual", fit.residual)
        .value("fit_points", fit.points as f64);

    let mut report = String::new();
    let _ = writeln!(
        report,
        "berry-temporal: x = {x:.6}, M = {}, {} samples of {period:.6}/{} from t = {:.6}",
        p.modes,
        p.samples,
        p.resolution,
        j0 as f64 * dt
    );
    let _ = writeln!(
        report,
        "  window [{:.3e}, {:.3e}] ({} lags): slope {:.4}, D = {:.4} (rms {:.3e})",
        window.0, window.1, fit.points, fit.slope, fit.dimension, fit.residual
    );
    Ok(RunOutput {
        experiment: cx.experiment,
        records: vec![record],
        summary: Vec::new(),
        series: series("S", &sf),
        report,
    })
}
