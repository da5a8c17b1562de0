//! The experiment catalog. Each experiment turns a validated config into
//! records (one per sweep point), optional summary records (fits across the
//! sweep), plot series and a short text report.

mod berry;
mod relativistic;
mod zeno;

use rayon::prelude::*;
use zenobox_core::fractal::{structure_function_spatial, Quantity, StructureFunction};
use zenobox_core::numerics::line_fit;
use zenobox_core::WaveField;

use crate::config::{Config, Experiment, Params, Physics};
use crate::error::Result;
use crate::record::{Provenance, ResultRecord, SeriesPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub experiment: Experiment,
    pub records: Vec<ResultRecord>,
    pub summary: Vec<ResultRecord>,
    pub series: Vec<SeriesPoint>,
    pub report: String,
}

pub(crate) struct Context<'a> {
    pub experiment: Experiment,
    pub physics: &'a Physics,
    pub provenance: Provenance,
}

impl Context<'_> {
    fn record(&self, point: usize) -> ResultRecord {
        ResultRecord::new(self.experiment.name(), point, &self.provenance)
    }
}

/// Runs `config` on the current rayon pool.
pub fn dispatch(config: &Config) -> Result<RunOutput> {
    config.validate()?;
    let cx = Context {
        experiment: config.experiment(),
        physics: &config.physics,
        provenance: Provenance {
            config_hash: config.hash(),
            seed: config.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    match &config.params {
        Params::BerrySpatial(p) => berry::spatial(&cx, p),
        Params::BerryTemporal(p) => berry::temporal(&cx, p),
        Params::SmalltRemainder(p) => zeno::smallt(&cx, p),
        Params::ZenoSurvival(p) => zeno::survival(&cx, p),
        Params::ZenoCutoff(p) => zeno::cutoff(&cx, p),
        Params::EpsilonEquivalence(p) => zeno::equivalence(&cx, p),
        Params::ComptonCutoff(p) => relativistic::compton(&cx, p),
        Params::TelegraphDiffusion(p) => relativistic::telegraph(&cx, config.seed, p),
    }
}

/// Spatial structure function with the scales evaluated in parallel.
pub(crate) fn spatial_structure(
    field: &WaveField,
    offsets: &[usize],
    q: Quantity,
) -> Result<StructureFunction> {
    let parts = offsets
        .par_iter()
        .map(|&k| structure_function_spatial(field, &[k], q))
        .collect::<Result<Vec<_>, _>>()?;
    let scales = parts.iter().map(|p| p.scales[0]).collect();
    let values = parts.iter().map(|p| p.values[0]).collect();
    let counts = parts.iter().map(|p| p.counts[0]).collect();
    Ok(StructureFunction::new(scales, values, counts, q)?)
}

pub(crate) fn series(curve: &str, sf: &StructureFunction) -> Vec<SeriesPoint> {
    sf.scales
        .iter()
        .zip(&sf.values)
        .map(|(&x, &y)| SeriesPoint {
            curve: curve.to_string(),
            x,
            y,
        })
        .collect()
}

/// Log-log slope and intercept through the finite positive pairs, NaN when
/// fewer than two remain.
pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> (f64, f64, usize) {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite() && **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    match line_fit(&lx, &ly) {
        Ok(f) => (f.slope, f.intercept, lx.len()),
        Err(_) => (f64::NAN, f64::NAN, lx.len()),
    }
}

/// n log-spaced values from lo to hi inclusive.
pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
