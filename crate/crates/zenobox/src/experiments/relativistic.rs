use std::fmt::Write;

use rayon::prelude::*;
use zenobox_core::relativistic::{
    compton_crossover_experiment, mean_free_path, telegraph_block, telegraph_diffusion_constant,
    telegraph_variance, RelativisticParams, TelegraphAccumulator, TelegraphConfig, TELEGRAPH_BLOCK,
};
use zenobox_core::Error as CoreError;

use super::{log_space, loglog_slope, series, Context, RunOutput};
use crate::config::{ComptonCutoff, TelegraphDiffusion};
use crate::error::Result;
use crate::record::SeriesPoint;

pub(crate) fn compton(cx: &Context, p: &ComptonCutoff) -> Result<RunOutput> {
    let kp = cx.physics.kernel(p.time)?;
    let runs = p
        .speeds
        .par_iter()
        .map(|&c| -> Result<_> {
            let rel = RelativisticParams::for_kernel(c, &kp)?;
            let lc = rel.compton_wavelength();
            let scales = log_space(p.scale_lo * lc, p.scale_hi * lc, p.scales);
            match compton_crossover_experiment(&kp, &rel, p.time, p.x, &scales) {
                Ok(r) => Ok((lc, Some(r))),
                Err(CoreError::SingleRegime { .. }) => Ok((lc, None)),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut pts: Vec<SeriesPoint> = Vec::new();
    let mut stars = Vec::new();
    let mut report = String::new();
    let _ = writeln!(report, "compton-cutoff: t = {}, x = {}", p.time, p.x);
    for (i, (&c, (lc, run))) in p.speeds.iter().zip(&runs).enumerate() {
        let mut r = cx.record(i).param("c", c).value("compton_wavelength", *lc);
        match run {
            Some(run) => {
                let x = &run.crossover;
                r = r
                    .value("n_max", run.n_max as f64)
                    .value("delta_star", x.scale)
                    .value("ratio", x.scale / lc)
                    .value("slope_small", x.slope_small)
                    .value("slope_large", x.slope_large);
                let _ = writeln!(
                    report,
                    "  c = {c:>8}: λ_C = {lc:.4e}, {} images, Δ* = {:.4e}, Δ*/λ_C = {:.3}, slopes {:.3} | {:.3}",
                    run.n_max,
                    x.scale,
                    x.scale / lc,
                    x.slope_small,
                    x.slope_large
                );
                stars.push(x.scale);
                pts.extend(series(&format!("c={c}"), &run.structure));
            }
            None => {
                r = r
                    .value("n_max", f64::NAN)
                    .value("delta_star", f64::NAN)
                    .value("ratio", f64::NAN)
                    .value("slope_small", f64::NAN)
                    .value("slope_large", f64::NAN)
                    .flag("single-regime");
                let _ = writeln!(report, "  c = {c:>8}: single scaling regime");
                stars.push(f64::NAN);
            }
        }
        records.push(r);
    }
    let (slope, _, used) = loglog_slope(&p.speeds, &stars);
    let ratios: Vec<f64> = records
        .iter()
        .filter_map(|r| r.get("ratio"))
        .filter(|r| r.is_finite())
        .collect();
    let within = ratios.iter().filter(|&&r| (0.5..=2.0).contains(&r)).count();
    let mut summary = cx
        .record(0)
        .param("time", p.time)
        .param("x", p.x)
        .value("slope", slope)
        .value("fit_points", used as f64)
        .value("ratio_min", ratios.iter().cloned().fold(f64::NAN, f64::min))
        .value("ratio_max", ratios.iter().cloned().fold(f64::NAN, f64::max))
        .value("within_factor_two", within as f64);
    if used < 2 {
        summary = summary.flag("too-few-knees");
    }
    let _ = writeln!(
        report,
        "  Δ* ∝ c^{slope:.4}; {within}/{} points within a factor of 2 of λ_C",
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

pub(crate) fn telegraph(cx: &Context, seed: u64, p: &TelegraphDiffusion) -> Result<RunOutput> {
    let ph = cx.physics;
    let rel = RelativisticParams::new(p.c, ph.mass, ph.hbar)?;
    let rate = rel.reversal_rate();
    let cfg = TelegraphConfig::evenly_recorded(p.walkers, seed, p.duration / rate, p.record_points);
    cfg.validate()?;
    let starts: Vec<usize> = (0..p.walkers).step_by(TELEGRAPH_BLOCK).collect();
    let blocks: Vec<TelegraphAccumulator> = starts
        .par_iter()
        .map(|&s| telegraph_block(&rel, &cfg, s, (s + TELEGRAPH_BLOCK).min(p.walkers)))
        .collect();
    let mut total = TelegraphAccumulator::new(cfg.record_times.len());
    for b in &blocks {
        total.merge(b);
    }
    let stats = total.finish(&rel, &cfg);

    let exact_d = telegraph_diffusion_constant(&rel);
    let t_last = cfg.duration;
    // diffusion constant implied by the exact variance at the final time
    let exact_at_t = telegraph_variance(&rel, t_last) / (2.0 * t_last);
    let lc = mean_free_path(&rel);
    let mut worst_z: f64 = 0.0;
    let records = stats
        .record_times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let var = telegraph_variance(&rel, t);
            let z = (stats.msd[i] - var) / stats.msd_stderr[i];
            worst_z = worst_z.max(z.abs());
            cx.record(i)
                .param("time", t)
                .value("mean", stats.mean[i])
                .value("mean_stderr", stats.mean_stderr[i])
                .value("msd", stats.msd[i])
                .value("msd_stderr", stats.msd_stderr[i])
                .value("exact_variance", var)
                .value("z_score", z)
        })
        .collect();
    let d_err = stats.diffusion_estimate / exact_d - 1.0;
    let mfp_err = stats.mean_flight_length / lc - 1.0;
    let mut summary = cx
        .record(0)
        .param("c", p.c)
        .param("walkers", p.walkers as f64)
        .param("duration", t_last)
        .value("reversal_rate", rate)
        .value("diffusion_estimate", stats.diffusion_estimate)
        .value("diffusion_exact", exact_d)
        .value("diffusion_exact_at_duration", exact_at_t)
        .value("diffusion_rel_error", d_err)
        .value("hbar_over_2m", ph.hbar / (2.0 * ph.mass))
        .value("mean_flight_length", stats.mean_flight_length)
        .value("compton_wavelength", lc)
        .value("flight_rel_error", mfp_err)
        .value("flights", stats.flights as f64)
        .value("max_abs_z", worst_z);
    if !stats.diffusive {
        summary = summary.flag("short-run");
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "telegraph-diffusion: c = {}, λ = {rate}, {} walkers, T = {t_last:.4e} (seed {seed})",
        p.c, p.walkers
    );
    let _ = writeln!(
        report,
        "  D_est = {:.6e}, c²/2λ = {exact_d:.6e} (ħ/2m = {:.6e}), relative error {:+.3}%",
        stats.diffusion_estimate,
        ph.hbar / (2.0 * ph.mass),
        100.0 * d_err
    );
    let _ = writeln!(
        report,
        "  mean flight {:.6e}, λ_C = {lc:.6e}, relative error {:+.3}%",
        stats.mean_flight_length,
        100.0 * mfp_err
    );
    let _ = writeln!(
        report,
        "  MSD vs exact variance: largest |z| = {worst_z:.2}"
    );
    if !stats.diffusive {
        let _ = writeln!(
            report,
            "  warning: duration is short of the diffusive regime"
        );
    }
    let mut pts: Vec<SeriesPoint> = stats
        .record_times
        .iter()
        .zip(&stats.msd)
        .map(|(&x, &y)| SeriesPoint {
            curve: "msd".into(),
            x,
            y,
        })
        .collect();
    pts.extend(stats.record_times.iter().map(|&t| SeriesPoint {
        curve: "exact".into(),
        x: t,
        y: telegraph_variance(&rel, t),
    }));
    Ok(RunOutput {
        experiment: cx.experiment,
        records,
        summary: vec![summary],
        series: pts,
        report,
    })
}
