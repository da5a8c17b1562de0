use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;
use crate::propagators::{SpectralState, WaveField};

/// Which function of ψ the increments are taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantity {
    /// |ψ(u+Δ) − ψ(u)|²
    #[default]
    Complex,
    Real,
    Imag,
    /// increments of |ψ|²
    Density,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Complex => "complex",
            Quantity::Real => "re",
            Quantity::Imag => "im",
            Quantity::Density => "density",
        }
    }

    /// |q(b) − q(a)|².
    pub fn increment_sqr(&self, a: Complex64, b: Complex64) -> f64 {
        match self {
            Quantity::Complex => (b - a).norm_sqr(),
            Quantity::Real => (b.re - a.re).powi(2),
            Quantity::Imag => (b.im - a.im).powi(2),
            Quantity::Density => (b.norm_sqr() - a.norm_sqr()).powi(2),
        }
    }
}

/// Mean-square increments S(Δ_k) at strictly increasing scales.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunction {
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
    /// Number of increment pairs averaged at each scale.
    pub counts: Vec<usize>,
    pub quantity: Quantity,
}

impl StructureFunction {
    pub fn new(
        scales: Vec<f64>,
        values: Vec<f64>,
        counts: Vec<usize>,
        quantity: Quantity,
    ) -> Result<Self> {
        if scales.len() != values.len() || scales.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: scales.len(),
                found: values.len().min(counts.len()),
            });
        }
        if scales.windows(2).any(|w| !(w[1] > w[0])) || scales.first().is_some_and(|s| !(*s > 0.0))
        {
            return Err(Error::domain(
                "scales must be positive and strictly increasing",
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain(
                "structure-function values must be finite and non-negative",
            ));
        }
        Ok(Self {
            scales,
            values,
            counts,
            quantity,
        })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Roughly `count` integer offsets, log-spaced in [lo, hi], deduplicated.
pub fn log_spaced_offsets(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if lo == 0 || hi < lo || count == 0 {
        return Vec::new();
    }
    if count == 1 || hi == lo {
        return alloc::vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

/// Compensated mean of |q(v[j+k]) − q(v[j])|². With `periodic` the index
/// wraps and every sample starts a pair.
pub fn mean_square_increment(
    values: &[Complex64],
    offset: usize,
    quantity: Quantity,
    periodic: bool,
) -> (f64, usize) {
    let n = values.len();
    let mut acc = NeumaierSum::new();
    let count = if periodic {
        n
    } else {
        n.saturating_sub(offset)
    };
    for j in 0..count {
        let b = if periodic {
            values[(j + offset) % n]
        } else {
            values[j + offset]
        };
        acc.add(quantity.increment_sqr(values[j], b));
    }
    (acc.value() / count.max(1) as f64, count)
}

/// S(Δ) over all admissible positions of a grid field. Scales are given as
/// grid offsets k (Δ = k·h) and must satisfy 2 ≤ k and kh ≤ L/8.
pub fn structure_function_spatial(
    field: &WaveField,
    offsets: &[usize],
    quantity: Quantity,
) -> Result<StructureFunction> {
    let h = field.spacing();
    let max = ((field.box_length / 8.0) / h * (1.0 + 1e-12)).floor() as usize;
    check_offsets(offsets, max)?;
    let mut values = Vec::with_capacity(offsets.len());
    let mut counts = Vec::with_capacity(offsets.len());
    for &k in offsets {
        let (v, c) = mean_square_increment(&field.values, k, quantity, false);
        values.push(v);
        counts.push(c);
    }
    StructureFunction::new(
        offsets.iter().map(|&k| k as f64 * h).collect(),
        values,
        counts,
        quantity,
    )
}

pub(crate) fn check_offsets(offsets: &[usize], max: usize) -> Result<()> {
    if offsets.is_empty() {
        return Err(Error::domain("no scales requested"));
    }
    if let Some(&k) = offsets.iter().find(|&&k| k < 2) {
        return Err(Error::domain(alloc::format!(
            "scale of {k} sample(s) is below the resolution limit of 2 samples"
        )));
    }
    if let Some(&k) = offsets.iter().find(|&&k| k > max) {
        return Err(Error::domain(alloc::format!(
            "scale of {k} samples exceeds the largest admissible {max}"
        )));
    }
    if offsets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("scales must be strictly increasing"));
    }
    Ok(())
}

/// ψ(x, t_j) on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub x: f64,
    pub dt: f64,
    pub values: Vec<Complex64>,
    /// True when the samples cover exactly one period.
    pub periodic: bool,
}

/// ψ(x, t) at t_j = j·T_rev/S, j < S, over one revival period
/// T_rev = 4mL²/(πħ). Mode n advances by the phase 2πn²j/S, which is
/// reduced exactly in integer arithmetic. Every nonzero mode must satisfy
/// n² < S/2 so the sampled phases do not alias.
pub fn revival_time_series(state: &SpectralState, x: f64, samples: usize) -> Result<TimeSeries> {
    let l = state.params.box_length;
    if !(x > 0.0 && x < l) {
        return Err(Error::domain("time series position must be interior"));
    }
    if samples < 4 {
        return Err(Error::domain("time series needs at least 4 samples"));
    }
    let highest = state
        .coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .map_or(0, |i| i + 1);
    if 2 * highest * highest >= samples {
        return Err(Error::domain(alloc::format!(
            "mode {highest} aliases on {samples} samples per revival (needs n² < samples/2)"
        )));
    }
    let s = samples as u64;
    let roots: Vec<Complex64> = (0..samples)
        .map(|r| {
            let a = 2.0 * PI * r as f64 / samples as f64;
            Complex64::new(a.cos(), -a.sin())
        })
        .collect();
    let scale = (2.0 / l).sqrt();
    let amps: Vec<(u64, Complex64)> = state
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(i, c)| {
            let n = (i + 1) as u64;
            (n * n % s, *c * scale * (n as f64 * PI * x / l).sin())
        })
        .collect();
    let values = (0..s)
        .map(|j| {
            let mut acc = crate::numerics::ComplexSum::new();
            for &(n2, a) in &amps {
                acc.add(a * roots[(n2 * j % s) as usize]);
            }
            acc.value()
        })
        .collect();
    Ok(TimeSeries {
        x,
        dt: state.params.revival_time() / samples as f64,
        values,
        periodic: true,
    })
}

/// ψ(x, jΔt) for j < samples by direct synthesis (not assumed periodic).
pub fn time_series(state: &SpectralState, x: f64, dt: f64, samples: usize) -> Result<TimeSeries> {
    let p = &state.params;
    let l = p.box_length;
    if !(x > 0.0 && x < l) {
        return Err(Error::domain("time series position must be interior"));
    }
    if !(dt > 0.0 && dt.is_finite()) || samples < 2 {
        return Err(Error::domain(
            "time series needs dt > 0 and at least 2 samples",
        ));
    }
    let scale = (2.0 / l).sqrt();
    let values = (0..samples)
        .map(|j| {
            let t = j as f64 * dt;
            let mut acc = crate::numerics::ComplexSum::new();
            for (i, c) in state.coeffs.iter().enumerate() {
                let n = (i + 1) as u64;
                let phase = crate::numerics::wrap_phase(t * p.energy(n) / p.hbar);
                acc.add(
                    *c * Complex64::new(phase.cos(), -phase.sin()) * (n as f64 * PI * x / l).sin(),
                );
            }
            acc.value() * scale
        })
        .collect();
    Ok(TimeSeries {
        x,
        dt,
        values,
        periodic: false,
    })
}

/// S(Δt') = mean_t |q(t + Δt') − q(t)|² over a time series; offsets in
/// samples, at least 2 and at most an eighth of the series.
pub fn structure_function_temporal(
    series: &TimeSeries,
    offsets: &[usize],
    quantity: Quantity,
) -> Result<StructureFunction> {
    check_offsets(offsets, series.values.len() / 8)?;
    let mut values = Vec::with_capacity(offsets.len());
    let mut counts = Vec::with_capacity(offsets.len());
    for &k in offsets {
        let (v, c) = mean_square_increment(&series.values, k, quantity, series.periodic);
        values.push(v);
        counts.push(c);
    }
    StructureFunction::new(
        offsets.iter().map(|&k| k as f64 * series.dt).collect(),
        values,
        counts,
        quantity,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::{sample_wavefield, KernelParams};
    use alloc::vec;

    #[test]
    fn constant_field_has_zero_increments() {
        let f = WaveField::new(1.0, 0.0, vec![Complex64::new(0.7, -0.2); 257]).unwrap();
        let sf = structure_function_spatial(&f, &[2, 4, 8, 32], Quantity::Complex).unwrap();
        assert!(sf.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_sine_closed_form() {
        // 2(sin(π(x+d)) − sin(πx))² = 8 sin²(πd/2) cos²(πx + πd/2); its mean over
        // x ∈ [0, 1−d] is 8 sin²(πd/2) [(1−d)/2 − sin(πd)/2π] / (1−d)
        let s = SpectralState::eigenmode(1, 1, KernelParams::natural()).unwrap();
        let grid = 4001;
        let f = sample_wavefield(&s, grid).unwrap();
        let d = 0.1;
        let sf = structure_function_spatial(&f, &[400], Quantity::Real).unwrap();
        let a = PI * d;
        let amp = 8.0 * (a / 2.0).sin().powi(2);
        let exact = amp * ((1.0 - d) / 2.0 - a.sin() / (2.0 * PI)) / (1.0 - d);
        // the grid mean is a left Riemann sum of the same integrand
        assert!(
            (sf.values[0] - exact).abs() < f.spacing() * amp,
            "{} vs {exact}",
            sf.values[0]
        );
    }

    #[test]
    fn resolution_limits() {
        let f = WaveField::new(1.0, 0.0, vec![Complex64::new(0.0, 0.0); 101]).unwrap();
        assert!(structure_function_spatial(&f, &[1, 4], Quantity::Complex).is_err());
        assert!(structure_function_spatial(&f, &[2, 13], Quantity::Complex).is_err());
        assert!(structure_function_spatial(&f, &[4, 4], Quantity::Complex).is_err());
        assert!(structure_function_spatial(&f, &[2, 12], Quantity::Complex).is_ok());
    }

    #[test]
    fn frozen_evolution_time_series() {
        // E_n ∝ 1/m vanishes to double precision
        let p = KernelParams {
            mass: 1e300,
            ..KernelParams::natural()
        };
        let s = crate::propagators::project_constant_state(9, &p).unwrap();
        let series = time_series(&s, 0.3, 0.01, 512).unwrap();
        let sf = structure_function_temporal(&series, &[2, 8, 32], Quantity::Complex).unwrap();
        assert!(sf.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn direct_and_revival_series_agree() {
        let p = KernelParams::natural();
        let s = crate::propagators::project_constant_state(15, &p).unwrap();
        let rev = revival_time_series(&s, 0.41, 1024).unwrap();
        let direct = time_series(&s, 0.41, rev.dt, 1024).unwrap();
        for (a, b) in rev.values.iter().zip(&direct.values) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn single_mode_temporal_closed_form() {
        let p = KernelParams::natural();
        let c = Complex64::new(0.6, 0.3);
        let s = SpectralState::new(vec![c], p).unwrap();
        let x = 0.37;
        let series = revival_time_series(&s, x, 1024).unwrap();
        let sf = structure_function_temporal(&series, &[2, 16, 100], Quantity::Complex).unwrap();
        let u = 2f64.sqrt() * (PI * x).sin();
        for (dt, v) in sf.scales.iter().zip(&sf.values) {
            let exact = 2.0 * (c * u).norm_sqr() * (1.0 - (p.energy(1) * dt).cos());
            assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
        }
    }

    #[test]
    fn aliasing_guard() {
        let s = crate::propagators::project_constant_state(12, &KernelParams::natural()).unwrap();
        assert!(revival_time_series(&s, 0.3, 242).is_err());
        assert!(revival_time_series(&s, 0.3, 243).is_ok());
        assert!(revival_time_series(&s, 0.3, 512).is_ok());
        assert!(revival_time_series(&s, 0.0, 512).is_err());
    }

    #[test]
    fn offsets_are_log_spaced_and_unique() {
        let o = log_spaced_offsets(2, 1000, 30);
        assert_eq!(o[0], 2);
        assert_eq!(*o.last().unwrap(), 1000);
        assert!(o.windows(2).all(|w| w[1] > w[0]));
    }
}
