//! Experiment configuration files.
//!
//! ```toml
//! schema_version = 1
//! experiment = "berry-spatial"
//! seed = 0
//!
//! [physics]
//! mass = 1.0
//! hbar = 1.0
//! box_length = 1.0
//!
//! [params]
//! modes = 100000
//! ```
//!
//! Missing `[physics]` and `[params]` keys take the preset values; unknown
//! keys anywhere are errors. Validation checks every precondition of the
//! routines the experiment will call, so a config that validates can only
//! fail at run time through an exhausted numerical budget.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zenobox_core::fractal::{log_spaced_offsets, Quantity, MIN_FIT_POINTS};
use zenobox_core::relativistic::{
    RelativisticParams, DIFFUSIVE_DURATION, MIN_COMPTON_PATHS, MIN_WALKERS,
};
use zenobox_core::KernelParams;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest Zeno matrix the runner will assemble.
pub const MAX_MATRIX_MODES: usize = 256;
/// Largest spectral state or image count the runner will build.
pub const MAX_MODES: usize = 10_000_000;
pub const MAX_GRID_INTERVALS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    BerrySpatial,
    BerryTemporal,
    SmalltRemainder,
    ZenoSurvival,
    ZenoCutoff,
    EpsilonEquivalence,
    ComptonCutoff,
    TelegraphDiffusion,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::BerrySpatial,
        Experiment::BerryTemporal,
        Experiment::SmalltRemainder,
        Experiment::ZenoSurvival,
        Experiment::ZenoCutoff,
        Experiment::EpsilonEquivalence,
        Experiment::ComptonCutoff,
        Experiment::TelegraphDiffusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::BerrySpatial => "berry-spatial",
            Experiment::BerryTemporal => "berry-temporal",
            Experiment::SmalltRemainder => "smallt-remainder",
            Experiment::ZenoSurvival => "zeno-survival",
            Experiment::ZenoCutoff => "zeno-cutoff",
            Experiment::EpsilonEquivalence => "epsilon-equivalence",
            Experiment::ComptonCutoff => "compton-cutoff",
            Experiment::TelegraphDiffusion => "telegraph-diffusion",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::BerrySpatial => {
                "spatial dimension of the evolved constant state (expect 3/2)"
            }
            Experiment::BerryTemporal => {
                "temporal dimension of ψ at a fixed interior point (expect 7/4)"
            }
            Experiment::SmalltRemainder => {
                "exponent of the Zeno matrix remainder beyond first order (expect 3/2)"
            }
            Experiment::ZenoSurvival => {
                "survival deficit under N projections at fixed T (expect N^-1/2)"
            }
            Experiment::ZenoCutoff => {
                "crossover scale of the damped eigensum vs measurement interval (expect ∝ Δt)"
            }
            Experiment::EpsilonEquivalence => {
                "crossover of exact matrix powering vs the damped eigensum surrogate"
            }
            Experiment::ComptonCutoff => {
                "crossover scale of the velocity-limited path sum vs c (expect ∝ 1/c)"
            }
            Experiment::TelegraphDiffusion => {
                "diffusion constant and mean free path of the Poisson-reversal walk"
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
                Error::config(format!(
                    "unknown experiment {name:?} (known: {})",
                    known.join(", ")
                ))
            })
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub mass: f64,
    pub hbar: f64,
    pub box_length: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            box_length: 1.0,
        }
    }
}

impl Physics {
    /// Kernel parameters at time `t` with no regulator.
    pub fn kernel(&self, t: f64) -> Result<KernelParams> {
        Ok(KernelParams::new(
            self.mass,
            self.hbar,
            self.box_length,
            t,
            0.0,
        )?)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("hbar", self.hbar),
            ("box_length", self.box_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!(
                    "physics.{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// (2mL²/πħ)/√2, the default evaluation time of the fractal experiments.
    pub fn irrational_time(&self) -> f64 {
        KernelParams {
            mass: self.mass,
            hbar: self.hbar,
            box_length: self.box_length,
            time: 0.0,
            epsilon: 0.0,
        }
        .irrational_time()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QuantityName {
    #[default]
    Complex,
    Real,
    Imag,
    Density,
}

impl From<QuantityName> for Quantity {
    fn from(q: QuantityName) -> Self {
        match q {
            QuantityName::Complex => Quantity::Complex,
            QuantityName::Real => Quantity::Real,
            QuantityName::Imag => Quantity::Imag,
            QuantityName::Density => Quantity::Density,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerrySpatial {
    /// Evaluation time; omitted means the irrational default.
    pub time: Option<f64>,
    pub modes: usize,
    pub grid_intervals: usize,
    /// Requested number of log-spaced scales between 2h and L/8.
    pub scales: usize,
    /// Fit window lower edge in units of the truncation scale L/(πM).
    pub window_lo: f64,
    /// Fit window upper edge in units of L.
    pub window_hi: f64,
    pub quantity: QuantityName,
}

impl Default for BerrySpatial {
    fn default() -> Self {
        Self {
            time: None,
            modes: 100_000,
            grid_intervals: 1 << 21,
            scales: 48,
            window_lo: 10.0,
            window_hi: 1.0 / 16.0,
            quantity: QuantityName::Complex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerryTemporal {
    /// Observation point; omitted means L/√5.
    pub x: Option<f64>,
    pub modes: usize,
    /// Time grid: samples per revival period.
    pub resolution: usize,
    /// Consecutive samples analysed.
    pub samples: usize,
    /// First sample time; omitted means the irrational default.
    pub start: Option<f64>,
    /// Requested number of log-spaced lags between 2 samples and samples/8.
    pub scales: usize,
    /// Fit window lower edge in units of the truncation time T_rev/n_max².
    pub window_lo: f64,
    /// Fit window upper edge in units of the analysed duration.
    pub window_hi: f64,
    pub quantity: QuantityName,
}

impl Default for BerryTemporal {
    fn default() -> Self {
        Self {
            x: None,
            modes: 1447,
            resolution: 1 << 22,
            samples: 1 << 16,
            start: None,
            scales: 48,
            window_lo: 10.0,
            window_hi: 1.0 / 64.0,
            quantity: QuantityName::Complex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmalltRemainder {
    pub modes: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub points: usize,
    pub quad_tol: f64,
    /// Second mode cutoff for the convergence check; omitted skips it.
    pub compare_modes: Option<usize>,
}

impl Default for SmalltRemainder {
    fn default() -> Self {
        Self {
            modes: 32,
            dt_min: 1e-4,
            dt_max: 10f64.powf(-2.5),
            points: 8,
            quad_tol: zenobox_core::zeno::DEFAULT_GMN_TOL,
            compare_modes: Some(64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZenoSurvival {
    pub total_time: f64,
    pub modes: usize,
    pub projections: Vec<u64>,
    /// Dirichlet mode the particle starts in.
    pub initial_mode: usize,
    /// Leading block on which G^N is compared with the Dirichlet evolution.
    pub limit_block: usize,
    pub quad_tol: f64,
}

impl Default for ZenoSurvival {
    fn default() -> Self {
        Self {
            total_time: 0.01,
            modes: 64,
            projections: vec![8, 16, 32, 64, 128, 256, 512],
            initial_mode: 1,
            limit_block: 8,
            quad_tol: zenobox_core::zeno::DEFAULT_GMN_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZenoCutoff {
    /// Evolution time T; omitted means the irrational default.
    pub time: Option<f64>,
    pub modes: usize,
    pub grid_intervals: usize,
    /// Measurement intervals Δt; N = T/Δt.
    pub dts: Vec<f64>,
    pub scales: usize,
    /// Largest scale in units of L.
    pub scale_max: f64,
}

impl Default for ZenoCutoff {
    fn default() -> Self {
        Self {
            time: None,
            modes: 100_000,
            grid_intervals: 1 << 20,
            dts: vec![1e-4, 3e-4, 1e-3, 3e-3],
            scales: 48,
            scale_max: 1.0 / 16.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonEquivalence {
    pub total_time: f64,
    pub modes: usize,
    pub projections: u64,
    pub grid_intervals: usize,
    pub scales: usize,
    /// Largest scale in units of L.
    pub scale_max: f64,
    pub quad_tol: f64,
}

impl Default for EpsilonEquivalence {
    fn default() -> Self {
        Self {
            total_time: 0.5,
            modes: 64,
            projections: 16,
            grid_intervals: 4096,
            scales: 48,
            scale_max: 1.0 / 8.0,
            quad_tol: zenobox_core::zeno::DEFAULT_GMN_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComptonCutoff {
    pub time: f64,
    pub x: f64,
    pub speeds: Vec<f64>,
    pub scales: usize,
    /// Scale range in units of the Compton wavelength at each c.
    pub scale_lo: f64,
    pub scale_hi: f64,
}

impl Default for ComptonCutoff {
    fn default() -> Self {
        Self {
            time: 1.0,
            x: 0.3,
            speeds: vec![50.0, 100.0, 200.0, 500.0],
            scales: 40,
            scale_lo: 1.0 / 30.0,
            scale_hi: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TelegraphDiffusion {
    pub c: f64,
    pub walkers: usize,
    /// Duration in mean flight times 1/λ.
    pub duration: f64,
    pub record_points: usize,
}

impl Default for TelegraphDiffusion {
    fn default() -> Self {
        Self {
            c: 10.0,
            walkers: 100_000,
            duration: 50.0,
            record_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    BerrySpatial(BerrySpatial),
    BerryTemporal(BerryTemporal),
    SmalltRemainder(SmalltRemainder),
    ZenoSurvival(ZenoSurvival),
    ZenoCutoff(ZenoCutoff),
    EpsilonEquivalence(EpsilonEquivalence),
    ComptonCutoff(ComptonCutoff),
    TelegraphDiffusion(TelegraphDiffusion),
}

impl Params {
    pub fn preset(e: Experiment) -> Self {
        match e {
            Experiment::BerrySpatial => Params::BerrySpatial(Default::default()),
            Experiment::BerryTemporal => Params::BerryTemporal(Default::default()),
            Experiment::SmalltRemainder => Params::SmalltRemainder(Default::default()),
            Experiment::ZenoSurvival => Params::ZenoSurvival(Default::default()),
            Experiment::ZenoCutoff => Params::ZenoCutoff(Default::default()),
            Experiment::EpsilonEquivalence => Params::EpsilonEquivalence(Default::default()),
            Experiment::ComptonCutoff => Params::ComptonCutoff(Default::default()),
            Experiment::TelegraphDiffusion => Params::TelegraphDiffusion(Default::default()),
        }
    }

    pub fn experiment(&self) -> Experiment {
        match self {
            Params::BerrySpatial(_) => Experiment::BerrySpatial,
            Params::BerryTemporal(_) => Experiment::BerryTemporal,
            Params::SmalltRemainder(_) => Experiment::SmalltRemainder,
            Params::ZenoSurvival(_) => Experiment::ZenoSurvival,
            Params::ZenoCutoff(_) => Experiment::ZenoCutoff,
            Params::EpsilonEquivalence(_) => Experiment::EpsilonEquivalence,
            Params::ComptonCutoff(_) => Experiment::ComptonCutoff,
            Params::TelegraphDiffusion(_) => Experiment::TelegraphDiffusion,
        }
    }

    fn parse(e: Experiment, table: toml::Table) -> Result<Self> {
        fn de<T: for<'a> Deserialize<'a>>(table: toml::Table) -> Result<T> {
            toml::Value::Table(table)
                .try_into()
                .map_err(|err: toml::de::Error| {
                    Error::config(format!("[params]: {}", err.message()))
                })
        }
        Ok(match e {
            Experiment::BerrySpatial => Params::BerrySpatial(de(table)?),
            Experiment::BerryTemporal => Params::BerryTemporal(de(table)?),
            Experiment::SmalltRemainder => Params::SmalltRemainder(de(table)?),
            Experiment::ZenoSurvival => Params::ZenoSurvival(de(table)?),
            Experiment::ZenoCutoff => Params::ZenoCutoff(de(table)?),
            Experiment::EpsilonEquivalence => Params::EpsilonEquivalence(de(table)?),
            Experiment::ComptonCutoff => Params::ComptonCutoff(de(table)?),
            Experiment::TelegraphDiffusion => Params::TelegraphDiffusion(de(table)?),
        })
    }

    fn to_table(&self) -> toml::Table {
        let v = match self {
            Params::BerrySpatial(p) => toml::Table::try_from(p),
            Params::BerryTemporal(p) => toml::Table::try_from(p),
            Params::SmalltRemainder(p) => toml::Table::try_from(p),
            Params::ZenoSurvival(p) => toml::Table::try_from(p),
            Params::ZenoCutoff(p) => toml::Table::try_from(p),
            Params::EpsilonEquivalence(p) => toml::Table::try_from(p),
            Params::ComptonCutoff(p) => toml::Table::try_from(p),
            Params::TelegraphDiffusion(p) => toml::Table::try_from(p),
        };
        v.expect("parameter structs serialize to tables")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    experiment: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    physics: Physics,
    #[serde(default)]
    params: toml::Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub physics: Physics,
    pub params: Params,
}

impl Config {
    pub fn preset(e: Experiment) -> Self {
        Self {
            seed: 0,
            physics: Physics::default(),
            params: Params::preset(e),
        }
    }

    pub fn experiment(&self) -> Experiment {
        self.params.experiment()
    }

    /// Parses and validates.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::config(e.message().to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let e = Experiment::from_name(&raw.experiment)?;
        let cfg = Self {
            seed: raw.seed,
            physics: raw.physics,
            params: Params::parse(e, raw.params)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML: every key explicit, fixed key order.
    pub fn to_toml(&self) -> String {
        let raw = RawConfig {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment().name().to_string(),
            seed: self.seed,
            physics: self.physics,
            params: self.params.to_table(),
        };
        toml::to_string(&raw).expect("config serializes")
    }

    /// Hex sha256 of [`Config::to_toml`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        let ph = &self.physics;
        let l = ph.box_length;
        match &self.params {
            Params::BerrySpatial(p) => {
                positive_time(p.time, "params.time")?;
                range("params.modes", p.modes, 1, MAX_MODES)?;
                range(
                    "params.grid_intervals",
                    p.grid_intervals,
                    16,
                    MAX_GRID_INTERVALS,
                )?;
                if p.grid_intervals < 2 * p.modes {
                    return Err(Error::config(format!(
                        "params.grid_intervals = {} does not resolve {} modes (needs at least 2·modes)",
                        p.grid_intervals, p.modes
                    )));
                }
                if !(p.window_lo >= 3.0) {
                    return Err(Error::config(
                        "params.window_lo must be at least 3 truncation scales L/(πM)",
                    ));
                }
                let h = l / p.grid_intervals as f64;
                let lo = p.window_lo * l / (std::f64::consts::PI * p.modes as f64);
                let hi = p.window_hi * l;
                if !(p.window_hi <= 0.125) {
                    return Err(Error::config(
                        "params.window_hi must not exceed 1/8 of the box",
                    ));
                }
                let offsets = spatial_offsets(p.grid_intervals, 0.125, p.scales)?;
                check_window(&offsets, h, lo, hi)?;
            }
            Params::BerryTemporal(p) => {
                let x = p.x.unwrap_or(l / 5f64.sqrt());
                if !(x > 0.0 && x < l) {
                    return Err(Error::config(format!(
                        "params.x = {x} must lie strictly inside (0, L)"
                    )));
                }
                if let Some(t0) = p.start {
                    if !(t0.is_finite() && t0 >= 0.0) {
                        return Err(Error::config(
                            "params.start must be non-negative and finite",
                        ));
                    }
                }
                range("params.modes", p.modes, 1, MAX_MODES)?;
                range("params.resolution", p.resolution, 64, MAX_GRID_INTERVALS)?;
                range("params.samples", p.samples, 64, p.resolution)?;
                let top = highest_odd(p.modes);
                if 2 * top * top >= p.resolution {
                    return Err(Error::config(format!(
                        "mode {top} aliases on {} samples per revival (needs 2n² < resolution)",
                        p.resolution
                    )));
                }
                if !(p.window_lo >= 3.0) {
                    return Err(Error::config(
                        "params.window_lo must be at least 3 truncation times T_rev/n²",
                    ));
                }
                if !(p.window_hi <= 0.125) {
                    return Err(Error::config(
                        "params.window_hi must not exceed 1/8 of the analysed duration",
                    ));
                }
                let offsets = log_spaced_offsets(2, p.samples / 8, p.scales);
                let lo = p.window_lo * p.resolution as f64 / (top * top) as f64;
                check_window(&offsets, 1.0, lo, p.window_hi * p.samples as f64)?;
            }
            Params::SmalltRemainder(p) => {
                range("params.modes", p.modes, 1, MAX_MATRIX_MODES)?;
                if let Some(m) = p.compare_modes {
                    range("params.compare_modes", m, 1, MAX_MATRIX_MODES)?;
                }
                if !(p.dt_min > 0.0 && p.dt_max > p.dt_min && p.dt_max.is_finite()) {
                    return Err(Error::config(
                        "params.dt_min and dt_max need 0 < dt_min < dt_max",
                    ));
                }
                if (p.dt_max / p.dt_min).log10() < 1.5 {
                    return Err(Error::config("the dt range must span at least 1.5 decades"));
                }
                range("params.points", p.points, 3, 1000)?;
                quad_tol(p.quad_tol)?;
            }
            Params::ZenoSurvival(p) => {
                positive("params.total_time", p.total_time)?;
                range("params.modes", p.modes, 1, MAX_MATRIX_MODES)?;
                range("params.initial_mode", p.initial_mode, 1, p.modes)?;
                range("params.limit_block", p.limit_block, 1, p.modes)?;
                if p.projections.len() < 3 {
                    return Err(Error::config(
                        "params.projections needs at least 3 values for the fit",
                    ));
                }
                if p.projections[0] < 1 || p.projections.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::config(
                        "params.projections must be positive and strictly increasing",
                    ));
                }
                quad_tol(p.quad_tol)?;
            }
            Params::ZenoCutoff(p) => {
                positive_time(p.time, "params.time")?;
                let t = p.time.unwrap_or_else(|| ph.irrational_time());
                range("params.modes", p.modes, 1, MAX_MODES)?;
                range(
                    "params.grid_intervals",
                    p.grid_intervals,
                    16,
                    MAX_GRID_INTERVALS,
                )?;
                if p.dts.len() < 2 {
                    return Err(Error::config("params.dts needs at least 2 intervals"));
                }
                if p.dts.iter().any(|d| !(*d > 0.0 && *d <= t)) {
                    return Err(Error::config(
                        "every entry of params.dts must lie in (0, T]",
                    ));
                }
                if p.dts.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::config("params.dts must be strictly increasing"));
                }
                crossover_scales(p.grid_intervals, p.scale_max, p.scales)?;
            }
            Params::EpsilonEquivalence(p) => {
                positive("params.total_time", p.total_time)?;
                range("params.modes", p.modes, 1, MAX_MATRIX_MODES)?;
                if p.projections < 1 {
                    return Err(Error::config("params.projections must be at least 1"));
                }
                range(
                    "params.grid_intervals",
                    p.grid_intervals,
                    16,
                    MAX_GRID_INTERVALS,
                )?;
                crossover_scales(p.grid_intervals, p.scale_max, p.scales)?;
                quad_tol(p.quad_tol)?;
            }
            Params::ComptonCutoff(p) => {
                positive("params.time", p.time)?;
                if !(p.x > 0.0 && p.x < l) {
                    return Err(Error::config(format!(
                        "params.x = {} must lie strictly inside (0, L)",
                        p.x
                    )));
                }
                if p.speeds.is_empty() {
                    return Err(Error::config("params.speeds is empty"));
                }
                if p.speeds.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::config("params.speeds must be strictly increasing"));
                }
                let kp = ph.kernel(p.time)?;
                for &c in &p.speeds {
                    let rel = RelativisticParams::for_kernel(c, &kp).map_err(|_| {
                        Error::config(format!("speed {c} must be positive and finite"))
                    })?;
                    let n = zenobox_core::relativistic::velocity_cutoff_index(&kp, &rel, p.time)?;
                    if n < MIN_COMPTON_PATHS {
                        return Err(Error::config(format!(
                            "c = {c} keeps {n} images at t = {}, need at least {MIN_COMPTON_PATHS}",
                            p.time
                        )));
                    }
                    if n > MAX_MODES {
                        return Err(Error::config(format!(
                            "c = {c} keeps {n} images, above the {MAX_MODES} limit"
                        )));
                    }
                }
                if !(p.scale_lo > 0.0 && p.scale_hi > p.scale_lo && p.scale_hi.is_finite()) {
                    return Err(Error::config(
                        "params.scale_lo and scale_hi need 0 < lo < hi",
                    ));
                }
                range("params.scales", p.scales, 7, 10_000)?;
            }
            Params::TelegraphDiffusion(p) => {
                positive("params.c", p.c)?;
                if p.walkers < MIN_WALKERS {
                    return Err(Error::config(format!(
                        "params.walkers = {} is below the minimum ensemble of {MIN_WALKERS}",
                        p.walkers
                    )));
                }
                if !(p.duration >= DIFFUSIVE_DURATION && p.duration.is_finite()) {
                    return Err(Error::config(format!(
                        "params.duration must be at least {DIFFUSIVE_DURATION} mean flight times"
                    )));
                }
                range("params.record_points", p.record_points, 1, 10_000)?;
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn positive_time(t: Option<f64>, name: &str) -> Result<()> {
    t.map_or(Ok(()), |t| positive(name, t))
}

fn range(name: &str, v: usize, lo: usize, hi: usize) -> Result<()> {
    if v < lo || v > hi {
        return Err(Error::config(format!("{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn quad_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::config(format!(
            "params.quad_tol = {tol} outside (0, 1e-3]"
        )));
    }
    Ok(())
}

/// Highest odd mode not above `modes`, the last nonzero coefficient of the
/// projected constant state.
pub(crate) fn highest_odd(modes: usize) -> usize {
    if modes % 2 == 1 {
        modes
    } else {
        modes - 1
    }
}

/// Log-spaced grid offsets from 2 up to `max_fraction` of the box.
pub(crate) fn spatial_offsets(
    intervals: usize,
    max_fraction: f64,
    count: usize,
) -> Result<Vec<usize>> {
    let top = (intervals as f64 * max_fraction * (1.0 + 1e-12)).floor() as usize;
    if top < 2 {
        return Err(Error::config(
            "the largest scale is below two grid spacings",
        ));
    }
    Ok(log_spaced_offsets(2, top, count))
}

fn crossover_scales(intervals: usize, scale_max: f64, count: usize) -> Result<Vec<usize>> {
    if !(scale_max > 0.0 && scale_max <= 0.125) {
        return Err(Error::config("params.scale_max must lie in (0, 1/8]"));
    }
    let offsets = spatial_offsets(intervals, scale_max, count)?;
    if offsets.len() < 8 {
        return Err(Error::config(format!(
            "only {} distinct scales; the crossover fit needs at least 8",
            offsets.len()
        )));
    }
    Ok(offsets)
}

fn check_window(offsets: &[usize], step: f64, lo: f64, hi: f64) -> Result<()> {
    if !(hi > lo) {
        return Err(Error::config(format!(
            "fit window [{lo:e}, {hi:e}] is empty"
        )));
    }
    if hi / lo < 10.0 {
        return Err(Error::config(format!(
            "fit window [{lo:e}, {hi:e}] spans less than a decade"
        )));
    }
    let inside = offsets
        .iter()
        .filter(|&&k| (k as f64 * step) >= lo && (k as f64 * step) <= hi)
        .count();
    if inside < MIN_FIT_POINTS {
        return Err(Error::config(format!(
            "fit window [{lo:e}, {hi:e}] holds {inside} scales, need at least {MIN_FIT_POINTS}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(e: Experiment) -> String {
        format!("schema_version = 1\nexperiment = \"{}\"\n", e.name())
    }

    #[test]
    fn minimal_config_takes_presets() {
        for e in Experiment::ALL {
            let cfg = Config::from_toml(&minimal(e)).unwrap();
            assert_eq!(cfg, Config::preset(e), "{e}");
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        for e in Experiment::ALL {
            let cfg = Config::preset(e);
            let back = Config::from_toml(&cfg.to_toml()).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.hash(), cfg.hash());
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::preset(Experiment::TelegraphDiffusion);
        let mut b = a.clone();
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let top = minimal(Experiment::BerrySpatial) + "sed = 3\n";
        assert!(matches!(Config::from_toml(&top), Err(Error::Config(m)) if m.contains("sed")));
        let nested = minimal(Experiment::BerrySpatial) + "[params]\nmodess = 10\n";
        assert!(
            matches!(Config::from_toml(&nested), Err(Error::Config(m)) if m.contains("modess"))
        );
        let phys = minimal(Experiment::BerrySpatial) + "[physics]\nc = 1.0\n";
        assert!(Config::from_toml(&phys).is_err());
    }

    #[test]
    fn schema_version_is_checked() {
        let text = "schema_version = 2\nexperiment = \"berry-spatial\"\n";
        assert!(
            matches!(Config::from_toml(text), Err(Error::Config(m)) if m.contains("schema_version"))
        );
        assert!(Config::from_toml("experiment = \"berry-spatial\"\n").is_err());
    }

    #[test]
    fn unknown_experiment_is_named() {
        let text = "schema_version = 1\nexperiment = \"berry-spacial\"\n";
        assert!(
            matches!(Config::from_toml(text), Err(Error::Config(m)) if m.contains("berry-spacial"))
        );
    }

    #[test]
    fn empty_sweeps_are_rejected() {
        let z = minimal(Experiment::ZenoCutoff) + "[params]\ndts = []\n";
        assert!(Config::from_toml(&z).is_err());
        let c = minimal(Experiment::ComptonCutoff) + "[params]\nspeeds = []\n";
        assert!(matches!(Config::from_toml(&c), Err(Error::Config(m)) if m.contains("speeds")));
        let s = minimal(Experiment::ZenoSurvival) + "[params]\nprojections = []\n";
        assert!(Config::from_toml(&s).is_err());
    }

    #[test]
    fn preconditions_are_named() {
        let cases = [
            (Experiment::BerrySpatial, "window_lo = 2.0", "window_lo"),
            (
                Experiment::BerrySpatial,
                "grid_intervals = 1024",
                "grid_intervals",
            ),
            (Experiment::BerryTemporal, "modes = 1449", "aliases"),
            (Experiment::BerryTemporal, "samples = 8388608", "samples"),
            (Experiment::SmalltRemainder, "dt_max = 1e-3", "1.5 decades"),
            (
                Experiment::ZenoSurvival,
                "initial_mode = 65",
                "initial_mode",
            ),
            (Experiment::ComptonCutoff, "speeds = [10.0]", "images"),
            (Experiment::TelegraphDiffusion, "walkers = 100", "walkers"),
            (Experiment::TelegraphDiffusion, "duration = 5.0", "duration"),
            (
                Experiment::EpsilonEquivalence,
                "grid_intervals = 32",
                "scales",
            ),
        ];
        for (e, line, needle) in cases {
            let text = minimal(e) + "[params]\n" + line + "\n";
            match Config::from_toml(&text) {
                Err(Error::Config(m)) => assert!(m.contains(needle), "{e}: {m}"),
                other => panic!("{e} with {line}: {other:?}"),
            }
        }
    }

    #[test]
    fn physics_must_be_positive() {
        let text = minimal(Experiment::BerrySpatial) + "[physics]\nmass = -1.0\n";
        assert!(matches!(Config::from_toml(&text), Err(Error::Config(m)) if m.contains("mass")));
    }

    #[test]
    fn presets_validate() {
        for e in Experiment::ALL {
            Config::preset(e).validate().unwrap();
        }
    }
}
