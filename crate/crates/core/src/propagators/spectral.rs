//! States expanded in the Dirichlet basis and their synthesis on a grid.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::numerics::sum::{sum_f64, ComplexSum};

/// Coefficients c_n, n = 1..=M, of ψ = Σ c_n u_n.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub coeffs: Vec<Complex64>,
    pub params: KernelParams,
}

impl SpectralState {
    pub fn new(coeffs: Vec<Complex64>, params: KernelParams) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a spectral state needs at least one mode"));
        }
        params.validate()?;
        Ok(Self { coeffs, params })
    }

    /// Single eigenmode n with unit amplitude.
    pub fn eigenmode(n: usize, modes: usize, params: KernelParams) -> Result<Self> {
        if n == 0 || n > modes {
            return Err(Error::domain("eigenmode index must lie in 1..=modes"));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); modes];
        coeffs[n - 1] = Complex64::new(1.0, 0.0);
        Self::new(coeffs, params)
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// c_n for n ≥ 1.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.coeffs[n - 1]
    }

    /// Σ |c_n|², compensated.
    pub fn norm_sqr(&self) -> f64 {
        sum_f64(self.coeffs.iter().map(|c| c.norm_sqr()))
    }

    /// ψ(x) by direct synthesis.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let l = self.params.box_length;
        let scale = (2.0 / l).sqrt();
        let mut acc = ComplexSum::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            acc.add(*c * (n * PI * x / l).sin());
        }
        acc.value() * scale
    }
}

/// Samples of ψ on the uniform grid x_j = jL/(len − 1).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub box_length: f64,
    pub time: f64,
    pub values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(box_length: f64, time: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain("a wave field needs at least two grid points"));
        }
        Ok(Self {
            box_length,
            time,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / (self.values.len() - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// Trapezoid-rule ∫₀^L |ψ|² dx over the grid.
    pub fn norm_sqr(&self) -> f64 {
        let last = self.values.len() - 1;
        let interior = sum_f64(self.values[1..last].iter().map(|v| v.norm_sqr()));
        let ends = 0.5 * (self.values[0].norm_sqr() + self.values[last].norm_sqr());
        (interior + ends) * self.spacing()
    }
}

/// Projection of ψ₀ = 1/√L onto the Dirichlet basis:
/// c_n = √2 (1 − (−1)ⁿ)/(nπ), zero for even n.
pub fn project_constant_state(modes: usize, params: &KernelParams) -> Result<SpectralState> {
    if modes == 0 {
        return Err(Error::domain("mode count must be at least 1"));
    }
    let coeffs = (1..=modes)
        .map(|n| {
            if n % 2 == 1 {
                Complex64::new(2.0 * core::f64::consts::SQRT_2 / (n as f64 * PI), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SpectralState::new(coeffs, *params)
}

/// Extra real damping of the finite-N Zeno surrogate: the eigenphase
/// acquires |e^{−i(t−iε_N)E_n/ħ}| = exp(−(nπħt / 2mNL²)²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoDamping {
    /// Number of measurement projections N over the evolution time.
    pub projections: f64,
}

impl ZenoDamping {
    pub fn new(projections: f64) -> Result<Self> {
        if !(projections.is_finite() && projections > 0.0) {
            return Err(Error::domain("projection count must be positive"));
        }
        Ok(Self { projections })
    }

    /// Damping for measurement interval `dt` over total time `t` (N = t/dt).
    pub fn from_interval(dt: f64, t: f64) -> Result<Self> {
        Self::new(t / dt)
    }

    pub fn factor(&self, n: u64, t: f64, params: &KernelParams) -> f64 {
        let l = params.box_length;
        let a = n as f64 * PI * params.hbar * t / (2.0 * params.mass * self.projections * l * l);
        (-a * a).exp()
    }
}

/// c_n ← c_n e^{−itE_n/ħ}, optionally times the Zeno damping factor.
pub fn evolve_spectral(
    state: &SpectralState,
    t: f64,
    damping: Option<ZenoDamping>,
) -> Result<SpectralState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain("evolution time must be non-negative"));
    }
    let p = &state.params;
    // E_n t / ħ = ω n² with ω = ħπ²t / (2mL²)
    let omega = p.hbar * PI * PI * t / (2.0 * p.mass * p.box_length * p.box_length);
    let coeffs = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = (i + 1) as u64;
            let phase = crate::numerics::wrap_phase(omega * (n * n) as f64);
            let mut out = *c * Complex64::new(phase.cos(), -phase.sin());
            if let Some(d) = damping {
                out *= d.factor(n, t, p);
            }
            out
        })
        .collect();
    Ok(SpectralState {
        coeffs,
        params: p.with_time(p.time + t),
    })
}

/// sin(πr/K) for r in 0..2K, with the zeros at r = 0 and r = K exact.
pub fn sine_table(intervals: usize) -> Vec<f64> {
    let k = intervals;
    let mut table: Vec<f64> = (0..2 * k)
        .map(|r| (PI * r as f64 / k as f64).sin())
        .collect();
    table[0] = 0.0;
    table[k] = 0.0;
    table
}

/// Direct sine synthesis of ψ on `grid_size` points spanning [0, L].
///
/// Each sample is a compensated sum over all modes; angles are reduced
/// exactly in integer arithmetic (nπj/K mod 2π), so the wall samples are
/// exactly zero. Cost is O(M · grid_size); the `zenobox` crate provides an
/// FFT-based equivalent for large grids.
pub fn sample_wavefield(state: &SpectralState, grid_size: usize) -> Result<WaveField> {
    if grid_size < 2 {
        return Err(Error::domain("grid_size must be at least 2"));
    }
    let k = grid_size - 1;
    let table = sine_table(k);
    let two_k = 2 * k as u64;
    let scale = (2.0 / state.params.box_length).sqrt();
    let values = (0..grid_size)
        .map(|j| {
            let mut acc = ComplexSum::new();
            let step = j as u64 % two_k;
            let mut r = 0u64;
            for c in &state.coeffs {
                r = (r + step) % two_k;
                acc.add(*c * table[r as usize]);
            }
            acc.value() * scale
        })
        .collect();
    WaveField::new(state.params.box_length, state.params.time, values)
}
