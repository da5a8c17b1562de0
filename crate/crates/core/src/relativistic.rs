//! Light-speed limits on the path sum and the telegraph (Poisson-reversal)
//! random walk.
//!
//! Paths bouncing n times need speed ≳ 2nL/t, so a speed limit c keeps only
//! images with n ≤ ct/(2L). The walk moves at ±c and reverses at rate
//! λ = mc²/ħ; its diffusion constant is c²/(2λ) = ħ/(2m).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fractal::{
    analytic_structure_function, crossover_scale, Crossover, Quantity, StructureFunction,
};
use crate::numerics::NeumaierSum;
use crate::propagators::KernelParams;
use crate::zeno::ZenoSchedule;

/// Speed of light together with the particle's mass and ħ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativisticParams {
    pub c: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl RelativisticParams {
    pub fn new(c: f64, mass: f64, hbar: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(c) || !ok(mass) || !ok(hbar) {
            return Err(Error::domain(
                "c, mass and hbar must be positive and finite",
            ));
        }
        Ok(Self { c, mass, hbar })
    }

    /// c with the mass and ħ of `params`.
    pub fn for_kernel(c: f64, params: &KernelParams) -> Result<Self> {
        Self::new(c, params.mass, params.hbar)
    }

    /// λ_C = ħ/(mc).
    pub fn compton_wavelength(&self) -> f64 {
        self.hbar / (self.mass * self.c)
    }

    /// λ = mc²/ħ.
    pub fn reversal_rate(&self) -> f64 {
        self.mass * self.c * self.c / self.hbar
    }
}

/// ⌊ct/(2L)⌋, the largest image index reachable below speed c.
pub fn velocity_cutoff_index(
    params: &KernelParams,
    rel: &RelativisticParams,
    t: f64,
) -> Result<usize> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("velocity cutoff needs t > 0"));
    }
    // the relative nudge keeps exact ratios such as c = 2L/t from rounding down
    Ok((rel.c * t / (2.0 * params.box_length) * (1.0 + 1e-12)).floor() as usize)
}

/// Minimum image count for the velocity-limited structure function to show
/// both regimes.
pub const MIN_COMPTON_PATHS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ComptonCrossover {
    pub crossover: Crossover,
    pub compton_wavelength: f64,
    pub n_max: usize,
    pub structure: StructureFunction,
}

/// Velocity-limited analytic structure function at position `x` and time
/// `t` over `scales`, and its knee.
pub fn compton_crossover_experiment(
    params: &KernelParams,
    rel: &RelativisticParams,
    t: f64,
    x: f64,
    scales: &[f64],
) -> Result<ComptonCrossover> {
    let n_max = velocity_cutoff_index(params, rel, t)?;
    if n_max < MIN_COMPTON_PATHS {
        return Err(Error::domain(alloc::format!(
            "velocity cutoff keeps {n_max} images, need at least {MIN_COMPTON_PATHS}"
        )));
    }
    let p = params.with_time(t);
    let values = scales
        .iter()
        .map(|&dx| analytic_structure_function(x, &p, dx, n_max))
        .collect::<Result<Vec<_>>>()?;
    let structure = StructureFunction::new(
        scales.to_vec(),
        values,
        vec![n_max; scales.len()],
        Quantity::Complex,
    )?;
    let crossover = crossover_scale(&structure)?;
    Ok(ComptonCrossover {
        crossover,
        compton_wavelength: rel.compton_wavelength(),
        n_max,
        structure,
    })
}

/// Δt/(L/c): the measurement interval in light-crossing times. The
/// predicted fractality floor is Δx/λ_C ≳ this ratio.
pub fn zeno_compton_bound(
    schedule: &ZenoSchedule,
    params: &KernelParams,
    rel: &RelativisticParams,
) -> f64 {
    schedule.dt * rel.c / params.box_length
}

/// c/λ = λ_C.
pub fn mean_free_path(rel: &RelativisticParams) -> f64 {
    rel.c / rel.reversal_rate()
}

/// δx < cδt. The inequality is strict: δx = cδt counts as relativistic.
pub fn nonrelativistic_condition(dx: f64, dt: f64, rel: &RelativisticParams) -> Result<bool> {
    if !(dx > 0.0 && dt > 0.0) {
        return Err(Error::domain("δx and δt must be positive"));
    }
    Ok(dx < rel.c * dt)
}

/// Minimum ensemble size accepted by [`telegraph_simulate`].
pub const MIN_WALKERS: usize = 10_000;
/// Durations shorter than this many mean flight times are flagged as not
/// diffusive.
pub const DIFFUSIVE_DURATION: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphConfig {
    pub walkers: usize,
    pub seed: u64,
    pub duration: f64,
    /// Times at which the ensemble is recorded, ascending, all ≤ duration.
    pub record_times: Vec<f64>,
}

impl TelegraphConfig {
    /// `points` evenly spaced record times ending at `duration`.
    pub fn evenly_recorded(walkers: usize, seed: u64, duration: f64, points: usize) -> Self {
        let mut record_times: Vec<f64> = (1..=points)
            .map(|i| duration * i as f64 / points as f64)
            .collect();
        if let Some(last) = record_times.last_mut() {
            *last = duration;
        }
        Self {
            walkers,
            seed,
            duration,
            record_times,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.walkers < MIN_WALKERS {
            return Err(Error::domain(alloc::format!(
                "telegraph ensemble needs at least {MIN_WALKERS} walkers"
            )));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::domain("duration must be positive"));
        }
        if self.record_times.is_empty()
            || self.record_times.windows(2).any(|w| !(w[1] > w[0]))
            || self.record_times[0] <= 0.0
            || *self.record_times.last().unwrap() > self.duration
        {
            return Err(Error::domain(
                "record times must be ascending in (0, duration]",
            ));
        }
        Ok(())
    }
}

/// One walker: positions at the record times and its reversal count.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerPath {
    pub positions: Vec<f64>,
    /// Reversals before `duration`.
    pub flights: u64,
}

fn uniform_open0(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1]: the +1 keeps ln finite
    ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
}

/// Simulates walker `index` on its own ChaCha8 stream (seed, stream =
/// index), so results do not depend on how walkers are scheduled.
pub fn simulate_walker(rel: &RelativisticParams, cfg: &TelegraphConfig, index: u64) -> WalkerPath {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let rate = rel.reversal_rate();
    let mut v = if rng.next_u64() >> 63 == 0 {
        rel.c
    } else {
        -rel.c
    };
    let mut t = 0.0;
    let mut x = 0.0;
    let mut positions = Vec::with_capacity(cfg.record_times.len());
    let mut next_record = 0;
    let mut flights = 0;
    loop {
        let wait = -uniform_open0(&mut rng).ln() / rate;
        let t_next = t + wait;
        while next_record < cfg.record_times.len() && cfg.record_times[next_record] <= t_next {
            positions.push(x + v * (cfg.record_times[next_record] - t));
            next_record += 1;
        }
        if t_next >= cfg.duration {
            break;
        }
        x += v * wait;
        t = t_next;
        v = -v;
        flights += 1;
    }
    WalkerPath { positions, flights }
}

/// Ensemble moments at each record time and flight statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphStats {
    pub record_times: Vec<f64>,
    pub mean: Vec<f64>,
    /// Mean-square displacement ⟨x²⟩.
    pub msd: Vec<f64>,
    /// Standard error of `msd`.
    pub msd_stderr: Vec<f64>,
    /// Standard error of `mean`.
    pub mean_stderr: Vec<f64>,
    /// MSD/(2T) at the final record time.
    pub diffusion_estimate: f64,
    pub mean_flight_length: f64,
    pub flights: u64,
    pub walkers: usize,
    /// False when the duration is shorter than 20 mean flight times.
    pub diffusive: bool,
}

/// Order-fixed accumulator of walker paths. Walkers are folded in fixed
/// blocks so a parallel caller that reduces the same blocks in order gets
/// bit-identical sums.
#[derive(Debug, Clone)]
pub struct TelegraphAccumulator {
    sum: Vec<NeumaierSum>,
    sum2: Vec<NeumaierSum>,
    sum4: Vec<NeumaierSum>,
    flights: u64,
    walkers: usize,
}

impl TelegraphAccumulator {
    pub fn new(records: usize) -> Self {
        Self {
            sum: vec![NeumaierSum::new(); records],
            sum2: vec![NeumaierSum::new(); records],
            sum4: vec![NeumaierSum::new(); records],
            flights: 0,
            walkers: 0,
        }
    }

    pub fn push(&mut self, path: &WalkerPath) {
        for (i, &x) in path.positions.iter().enumerate() {
            let x2 = x * x;
            self.sum[i].add(x);
            self.sum2[i].add(x2);
            self.sum4[i].add(x2 * x2);
        }
        self.flights += path.flights;
        self.walkers += 1;
    }

    /// Appends another accumulator's totals (as values, in call order).
    pub fn merge(&mut self, other: &Self) {
        for i in 0..self.sum.len() {
            self.sum[i].add(other.sum[i].value());
            self.sum2[i].add(other.sum2[i].value());
            self.sum4[i].add(other.sum4[i].value());
        }
        self.flights += other.flights;
        self.walkers += other.walkers;
    }

    pub fn finish(&self, rel: &RelativisticParams, cfg: &TelegraphConfig) -> TelegraphStats {
        let w = self.walkers as f64;
        let mut mean = Vec::new();
        let mut msd = Vec::new();
        let mut msd_stderr = Vec::new();
        let mut mean_stderr = Vec::new();
        for i in 0..self.sum.len() {
            let m1 = self.sum[i].value() / w;
            let m2 = self.sum2[i].value() / w;
            let m4 = self.sum4[i].value() / w;
            mean.push(m1);
            msd.push(m2);
            mean_stderr.push(((m2 - m1 * m1).max(0.0) / w).sqrt());
            msd_stderr.push(((m4 - m2 * m2).max(0.0) / w).sqrt());
        }
        let t_last = *cfg.record_times.last().expect("validated non-empty");
        TelegraphStats {
            record_times: cfg.record_times.clone(),
            diffusion_estimate: msd.last().copied().unwrap_or(0.0) / (2.0 * t_last),
            mean,
            msd,
            msd_stderr,
            mean_stderr,
            // total path length over reversal count: the rate estimate
            // λ̂ = reversals / walker-time turned into a length
            mean_flight_length: if self.flights > 0 {
                rel.c * cfg.duration * w / self.flights as f64
            } else {
                f64::INFINITY
            },
            flights: self.flights,
            walkers: self.walkers,
            diffusive: cfg.duration * rel.reversal_rate() >= DIFFUSIVE_DURATION,
        }
    }
}

/// Walkers per accumulation block.
pub const TELEGRAPH_BLOCK: usize = 4096;

/// Runs the ensemble sequentially in blocks of [`TELEGRAPH_BLOCK`] walkers.
pub fn telegraph_simulate(
    rel: &RelativisticParams,
    cfg: &TelegraphConfig,
) -> Result<TelegraphStats> {
    cfg.validate()?;
    let records = cfg.record_times.len();
    let mut total = TelegraphAccumulator::new(records);
    let mut start = 0;
    while start < cfg.walkers {
        let end = (start + TELEGRAPH_BLOCK).min(cfg.walkers);
        total.merge(&telegraph_block(rel, cfg, start, end));
        start = end;
    }
    Ok(total.finish(rel, cfg))
}

/// Accumulates walkers start..end.
pub fn telegraph_block(
    rel: &RelativisticParams,
    cfg: &TelegraphConfig,
    start: usize,
    end: usize,
) -> TelegraphAccumulator {
    let mut acc = TelegraphAccumulator::new(cfg.record_times.len());
    for i in start..end {
        acc.push(&simulate_walker(rel, cfg, i as u64));
    }
    acc
}

/// Var x(T) = (c²/λ)T − (c²/2λ²)(1 − e^{−2λT}) for a symmetric start.
pub fn telegraph_variance(rel: &RelativisticParams, t: f64) -> f64 {
    let c2 = rel.c * rel.c;
    let l = rel.reversal_rate();
    c2 / l * t - c2 / (2.0 * l * l) * (-(-2.0 * l * t).exp_m1())
}

/// c²/(2λ).
pub fn telegraph_diffusion_constant(rel: &RelativisticParams) -> f64 {
    rel.c * rel.c / (2.0 * rel.reversal_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(c: f64) -> RelativisticParams {
        RelativisticParams::new(c, 1.0, 1.0).unwrap()
    }

    #[test]
    fn velocity_cutoff_examples() {
        let p = KernelParams::natural();
        assert_eq!(velocity_cutoff_index(&p, &unit(2.0 / 0.7), 0.7).unwrap(), 1);
        assert_eq!(velocity_cutoff_index(&p, &unit(1.5), 1.0).unwrap(), 0);
        assert_eq!(velocity_cutoff_index(&p, &unit(100.0), 1.0).unwrap(), 50);
        assert!(velocity_cutoff_index(&p, &unit(100.0), 0.0).is_err());
    }

    #[test]
    fn identities() {
        for &(c, m, h) in &[(1.0, 1.0, 1.0), (3e8, 9.1e-31, 1.05e-34), (17.0, 0.3, 2.5)] {
            let r = RelativisticParams::new(c, m, h).unwrap();
            assert!(
                (r.compton_wavelength() * r.reversal_rate() - c).abs() <= 4.0 * f64::EPSILON * c
            );
            assert!(
                (mean_free_path(&r) - r.compton_wavelength()).abs()
                    <= 4.0 * f64::EPSILON * r.compton_wavelength()
            );
        }
        let heavy = RelativisticParams::new(5.0, 2.0, 1.0).unwrap();
        assert!((mean_free_path(&heavy) - mean_free_path(&unit(5.0)) / 2.0).abs() < 1e-15);
        assert!((telegraph_diffusion_constant(&unit(40.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn compton_bound_examples() {
        let p = KernelParams::natural();
        let r = unit(10.0);
        let s = ZenoSchedule::new(0.1, 1, 1).unwrap();
        assert!((zeno_compton_bound(&s, &p, &r) - 1.0).abs() < 1e-15);
        let s = ZenoSchedule::new(0.05, 1, 1).unwrap();
        assert!((zeno_compton_bound(&s, &p, &r) - 0.5).abs() < 1e-15);
        // rhs·λ_C = (ħ/mL)Δt
        let lhs = zeno_compton_bound(&s, &p, &r) * r.compton_wavelength();
        assert!((lhs - p.hbar * s.dt / (p.mass * p.box_length)).abs() < 1e-16);
    }

    #[test]
    fn nonrelativistic_tie_break() {
        let r = unit(3.0);
        assert!(nonrelativistic_condition(0.03, 0.1, &r).unwrap());
        assert!(!nonrelativistic_condition(0.6, 0.1, &r).unwrap());
        assert!(!nonrelativistic_condition(3.0 * 0.25, 0.25, &r).unwrap());
        assert!(nonrelativistic_condition(0.0, 0.1, &r).is_err());
    }

    fn compton_scales(lambda: f64) -> Vec<f64> {
        (0..40)
            .map(|i| lambda / 30.0 * 900f64.powf(i as f64 / 39.0))
            .collect()
    }

    #[test]
    fn compton_knee_tracks_one_over_c() {
        let p = KernelParams::natural();
        let mut ratios = Vec::new();
        for &c in &[50.0, 100.0, 200.0, 500.0] {
            let r = unit(c);
            let out = compton_crossover_experiment(
                &p,
                &r,
                1.0,
                0.3,
                &compton_scales(r.compton_wavelength()),
            )
            .unwrap();
            ratios.push(out.crossover.scale / out.compton_wavelength);
            assert!((out.crossover.slope_small - 2.0).abs() < 0.05);
        }
        // Independent evaluation of the same truncated sum and two-segment
        // fit gives Δ*/λ_C = 5.2435 for every c in this sweep.
        for r in &ratios {
            assert!((r - 5.2435).abs() < 1e-3, "{ratios:?}");
        }
    }

    #[test]
    fn compton_knee_independent_of_box_length() {
        let r = unit(200.0);
        let scales = compton_scales(r.compton_wavelength());
        let knees: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&l| {
                let p = KernelParams {
                    box_length: l,
                    ..KernelParams::natural()
                };
                compton_crossover_experiment(&p, &r, 1.0, 0.3 * l, &scales)
                    .unwrap()
                    .crossover
                    .scale
            })
            .collect();
        let (lo, hi) = knees
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), k| (a.min(*k), b.max(*k)));
        assert!(hi / lo < 2.0, "{knees:?}");
    }

    #[test]
    fn compton_needs_enough_paths_and_unbroken_limit() {
        let p = KernelParams::natural();
        assert!(
            compton_crossover_experiment(&p, &unit(10.0), 1.0, 0.3, &compton_scales(0.1)).is_err()
        );
        // c = 2·10⁶: the knee sits near 2.6·10⁻⁶, far below a window at 10⁻⁴…10⁻²
        let scales: Vec<f64> = (0..20)
            .map(|i| 1e-4 * 100f64.powf(i as f64 / 19.0))
            .collect();
        let err = compton_crossover_experiment(&p, &unit(2e6), 1.0, 0.3, &scales).unwrap_err();
        assert!(
            matches!(err, Error::SingleRegime { slope } if (slope - 1.0).abs() < 0.1),
            "{err:?}"
        );
    }

    #[test]
    fn telegraph_matches_exact_variance() {
        let r = unit(10.0); // λ = 100, λ_C = 0.1
        let cfg = TelegraphConfig::evenly_recorded(100_000, 2024, 50.0 / r.reversal_rate(), 10);
        let stats = telegraph_simulate(&r, &cfg).unwrap();
        assert!(stats.diffusive);
        for i in 0..cfg.record_times.len() {
            let exact = telegraph_variance(&r, cfg.record_times[i]);
            assert!(
                (stats.msd[i] - exact).abs() < 3.0 * stats.msd_stderr[i],
                "t={}",
                cfg.record_times[i]
            );
            assert!(stats.mean[i].abs() < 3.0 * stats.mean_stderr[i]);
        }
        let d = telegraph_diffusion_constant(&r);
        assert!((stats.diffusion_estimate - d).abs() < 0.05 * d);
        // λ = mc²/ħ makes c²/2λ = ħ/2m, the order of ħ/m
        assert!((d - 0.5).abs() < 1e-15);
        assert!(stats.flights > 100_000);
        assert!(
            (stats.mean_flight_length - r.compton_wavelength()).abs()
                < 0.02 * r.compton_wavelength()
        );
    }

    #[test]
    fn telegraph_is_seeded_and_flags_short_runs() {
        let r = unit(10.0);
        let cfg = TelegraphConfig::evenly_recorded(10_000, 5, 0.05, 3);
        let a = telegraph_simulate(&r, &cfg).unwrap();
        let b = telegraph_simulate(&r, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(!a.diffusive);
        let small = TelegraphConfig::evenly_recorded(10, 5, 1.0, 3);
        assert!(telegraph_simulate(&r, &small).is_err());
        let w = simulate_walker(&r, &cfg, 17);
        for (x, t) in w.positions.iter().zip(&cfg.record_times) {
            assert!(x.abs() <= r.c * t * (1.0 + 1e-12));
        }
    }
}
