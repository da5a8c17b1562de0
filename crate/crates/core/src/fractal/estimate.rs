use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::structure::StructureFunction;
use crate::error::{Error, Result};
use crate::numerics::{line_fit, LineFit};

/// Minimum number of scales inside a dimension-fit window.
pub const MIN_FIT_POINTS: usize = 8;
/// Slopes closer than this are treated as one scaling regime.
pub const REGIME_SEPARATION: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionFit {
    pub slope: f64,
    /// D = (4 − slope)/2.
    pub dimension: f64,
    pub window: (f64, f64),
    pub points: usize,
    /// rms residual in ln S.
    pub residual: f64,
}

impl DimensionFit {
    fn from_slope(slope: f64, window: (f64, f64), points: usize, residual: f64) -> Self {
        let dimension = (4.0 - slope) / 2.0;
        debug_assert!((slope - (4.0 - 2.0 * dimension)).abs() < 1e-12);
        Self {
            slope,
            dimension,
            window,
            points,
            residual,
        }
    }

    /// Whether D lies in [1, 2] up to `slack`.
    pub fn is_graph_dimension(&self, slack: f64) -> bool {
        self.dimension >= 1.0 - slack && self.dimension <= 2.0 + slack
    }
}

/// Least-squares log-log slope of S over the scales in `window`.
pub fn fit_dimension(sf: &StructureFunction, window: (f64, f64)) -> Result<DimensionFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain("fit window needs 0 < lo < hi"));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = sf
        .scales
        .iter()
        .zip(&sf.values)
        .filter(|(s, v)| **s >= lo && **s <= hi && **v > 0.0)
        .map(|(s, v)| (s.ln(), v.ln()))
        .unzip();
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::degenerate(alloc::format!(
            "fit window [{lo:e}, {hi:e}] holds {} usable scales, need {MIN_FIT_POINTS}",
            xs.len()
        )));
    }
    let span = (xs[xs.len() - 1] - xs[0]) / core::f64::consts::LN_10;
    if span < 1.0 - 1e-9 {
        return Err(Error::degenerate(alloc::format!(
            "fit window scales span {span:.2} decades, need at least 1"
        )));
    }
    let fit = line_fit(&xs, &ys)?;
    Ok(DimensionFit::from_slope(
        fit.slope,
        window,
        xs.len(),
        fit.rms,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFit {
    pub beta: f64,
    /// ½(5 − β).
    pub dimension: f64,
    pub fit: LineFit,
    pub points: usize,
}

/// β from |a_m|² ∼ m^{−β}, fitted over the nonzero coefficients (index m is
/// the position in `coeffs` plus one). Needs two decades of nonzero modes.
pub fn beta_from_spectrum(coeffs: &[Complex64]) -> Result<BetaFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(i, c)| (((i + 1) as f64).ln(), c.norm_sqr().ln()))
        .unzip();
    if xs.len() < 2 || (xs[xs.len() - 1] - xs[0]) < 2.0 * core::f64::consts::LN_10 - 1e-12 {
        return Err(Error::degenerate(
            "spectrum fit needs nonzero modes spanning two decades",
        ));
    }
    let fit = line_fit(&xs, &ys)?;
    let beta = -fit.slope;
    Ok(BetaFit {
        beta,
        dimension: 0.5 * (5.0 - beta),
        fit,
        points: xs.len(),
    })
}

/// Knee of a two-regime structure function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    /// Δ*, the sampled scale at the breakpoint.
    pub scale: f64,
    pub index: usize,
    pub slope_small: f64,
    pub slope_large: f64,
    /// Total squared residual of the two segments in ln S.
    pub sse: f64,
}

/// Exhaustive two-segment fit in log-log. The segments share the
/// breakpoint sample and each holds at least four points; the breakpoint
/// with the smallest total squared residual wins.
pub fn crossover_scale(sf: &StructureFunction) -> Result<Crossover> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = sf
        .scales
        .iter()
        .zip(&sf.values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(s, v)| (s.ln(), v.ln()))
        .unzip();
    let n = xs.len();
    if n < 7 {
        return Err(Error::degenerate(
            "crossover detection needs at least 7 positive samples",
        ));
    }
    let mut best: Option<Crossover> = None;
    for k in 3..n - 3 {
        let left = line_fit(&xs[..=k], &ys[..=k])?;
        let right = line_fit(&xs[k..], &ys[k..])?;
        let sse = left.sse + right.sse;
        if best.is_none_or(|b| sse < b.sse) {
            best = Some(Crossover {
                scale: xs[k].exp(),
                index: k,
                slope_small: left.slope,
                slope_large: right.slope,
                sse,
            });
        }
    }
    let best = best.expect("at least one breakpoint candidate");
    if (best.slope_small - best.slope_large).abs() < REGIME_SEPARATION {
        let whole = line_fit(&xs, &ys)?;
        return Err(Error::SingleRegime { slope: whole.slope });
    }
    Ok(best)
}
