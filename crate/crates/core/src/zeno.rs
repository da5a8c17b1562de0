//! Repeated projective measurement of presence in [0, L].
//!
//! One measurement cycle is free evolution for Δt followed by projection
//! onto the box; in the Dirichlet basis it is the matrix
//! G_mn(Δt) = ∫₀^L u_m(x) ∫₀^L g(x − y, ħΔt/m) u_n(y) dy dx.
//! The inner integral is done in closed form, the outer one adaptively.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;
use crate::numerics::quad::{quad_vec_tracked, DEFAULT_MAX_SUBDIVISIONS};
use crate::numerics::{line_fit, LineFit, NeumaierSum};
use crate::propagators::{gaussian_segment, KernelParams, SpectralState, WaveField};

/// Default absolute tolerance on the outer integral of each entry.
pub const DEFAULT_GMN_TOL: f64 = 1e-9;

/// Measurement interval Δt, projection count N and matrix mode cutoff M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoSchedule {
    pub dt: f64,
    pub projections: u64,
    pub modes: usize,
}

impl ZenoSchedule {
    pub fn new(dt: f64, projections: u64, modes: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain("measurement interval must be positive"));
        }
        if projections < 1 || modes < 1 {
            return Err(Error::domain(
                "projection count and mode cutoff must be at least 1",
            ));
        }
        Ok(Self {
            dt,
            projections,
            modes,
        })
    }

    /// N projections spread evenly over total time T.
    pub fn over_total_time(total: f64, projections: u64, modes: usize) -> Result<Self> {
        if projections < 1 {
            return Err(Error::domain("projection count must be at least 1"));
        }
        Self::new(total / projections as f64, projections, modes)
    }

    /// T = NΔt.
    pub fn total_time(&self) -> f64 {
        self.dt * self.projections as f64
    }
}

/// G(Δt) on the first M Dirichlet modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPropagatorMatrix {
    pub matrix: CMatrix,
    pub dt: f64,
    /// Outer-quadrature tolerance requested per entry.
    pub quad_tol: f64,
    /// Quadrature error estimate (largest entry).
    pub error_estimate: f64,
}

impl ProjectedPropagatorMatrix {
    pub fn modes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.matrix[(m - 1, n - 1)]
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Layout {
    /// Only entries with m ≤ n and m + n even, integrated over [0, L/2].
    Reduced,
    /// Every entry over [0, L]; used to check the symmetries the reduced
    /// layout assumes.
    #[cfg_attr(not(test), allow(dead_code))]
    Full,
}

/// Assembles G_mn(Δt) for m, n ≤ M with per-entry tolerance [`DEFAULT_GMN_TOL`].
pub fn gmn_matrix(
    schedule: &ZenoSchedule,
    params: &KernelParams,
) -> Result<ProjectedPropagatorMatrix> {
    gmn_matrix_with_tol(schedule, params, DEFAULT_GMN_TOL)
}

pub fn gmn_matrix_with_tol(
    schedule: &ZenoSchedule,
    params: &KernelParams,
    tol: f64,
) -> Result<ProjectedPropagatorMatrix> {
    assemble(schedule, params, tol, Layout::Reduced)
}

fn assemble(
    schedule: &ZenoSchedule,
    params: &KernelParams,
    tol: f64,
    layout: Layout,
) -> Result<ProjectedPropagatorMatrix> {
    params.validate()?;
    if !(tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    let p = params.with_time(schedule.dt);
    let sigma = p.complex_tau();
    let l = p.box_length;
    let m_max = schedule.modes;

    // u_m(L − x) = (−1)^{m+1} u_m(x), and I_n has the parity of u_n, so
    // G_mn vanishes for odd m + n and the remaining integrands are even
    // about L/2.
    let pairs: Vec<(usize, usize)> = match layout {
        Layout::Reduced => (1..=m_max)
            .flat_map(|m| {
                (m..=m_max)
                    .filter(move |n| (m + n) % 2 == 0)
                    .map(move |n| (m, n))
            })
            .collect(),
        Layout::Full => (1..=m_max)
            .flat_map(|m| (1..=m_max).map(move |n| (m, n)))
            .collect(),
    };
    let (upper, weight) = match layout {
        Layout::Reduced => (0.5 * l, 2.0),
        Layout::Full => (l, 1.0),
    };

    let norm = (2.0 / l).sqrt();
    let mut inner = vec![Complex64::new(0.0, 0.0); m_max];
    let mut outer = vec![0.0; m_max];
    let mut failure: Option<Error> = None;
    let mut integrand = |x: f64, out: &mut [Complex64]| {
        for n in 1..=m_max {
            match inner_integral(sigma, l, x, n) {
                Ok(v) => inner[n - 1] = v,
                Err(e) => {
                    failure.get_or_insert(e);
                    inner[n - 1] = Complex64::new(0.0, 0.0);
                }
            }
            outer[n - 1] = norm * (n as f64 * PI * x / l).sin();
        }
        for (slot, &(m, n)) in out.iter_mut().zip(&pairs) {
            *slot = inner[n - 1] * outer[m - 1];
        }
    };
    let result = quad_vec_tracked(
        &mut integrand,
        pairs.len(),
        0.0,
        upper,
        tol / weight,
        DEFAULT_MAX_SUBDIVISIONS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let result = result.map_err(|(e, worst)| match e {
        Error::Budget {
            estimate,
            error_estimate,
            ..
        } => {
            let (m, n) = pairs[worst];
            Error::Budget {
                what: format!(
                    "G_mn quadrature, worst entry (m, n) = ({m}, {n}), dt = {:e}",
                    schedule.dt
                ),
                estimate: estimate * weight,
                error_estimate: error_estimate * weight,
            }
        }
        other => other,
    })?;

    let mut matrix = CMatrix::zeros(m_max, m_max);
    for (&(m, n), v) in pairs.iter().zip(&result.values) {
        matrix[(m - 1, n - 1)] = *v * weight;
        if layout == Layout::Reduced {
            matrix[(n - 1, m - 1)] = *v * weight;
        }
    }
    Ok(ProjectedPropagatorMatrix {
        matrix,
        dt: schedule.dt,
        quad_tol: tol,
        error_estimate: result.error * weight,
    })
}

/// I_n(x) = ∫₀^L g(x−y, σ) u_n(y) dy = √(2/L) (J(k) − J(−k)) / 2i with
/// J(q) = ∫₀^L g(x−y) e^{iqy} dy in closed form.
fn inner_integral(sigma: Complex64, l: f64, x: f64, n: usize) -> Result<Complex64> {
    let k = n as f64 * PI / l;
    let a = gaussian_segment(sigma, k, x, x - l, x)?;
    let b = gaussian_segment(sigma, -k, x, x - l, x)?;
    Ok((a - b) * Complex64::new(0.0, -0.5 * (2.0 / l).sqrt()))
}

/// ψ on `grid_size` points of [0, L] after one more free step of length
/// `dt` and the projection: ψ(x) = Σₙ cₙ Iₙ(x).
///
/// This is G(Δt)·c without truncating the result to the mode cutoff; the
/// new edge structure the step creates near the walls is kept exactly.
pub fn projected_step_field(state: &SpectralState, dt: f64, grid_size: usize) -> Result<WaveField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain("step length must be positive"));
    }
    if grid_size < 2 {
        return Err(Error::domain("grid_size must be at least 2"));
    }
    let p = state.params.with_time(dt);
    p.validate()?;
    let sigma = p.complex_tau();
    let l = p.box_length;
    let h = l / (grid_size - 1) as f64;
    let values = (0..grid_size)
        .map(|j| {
            let x = if j + 1 == grid_size { l } else { j as f64 * h };
            let mut acc = crate::numerics::ComplexSum::new();
            for (i, c) in state.coeffs.iter().enumerate() {
                if *c != Complex64::new(0.0, 0.0) {
                    acc.add(*c * inner_integral(sigma, l, x, i + 1)?);
                }
            }
            Ok(acc.value())
        })
        .collect::<Result<Vec<_>>>()?;
    WaveField::new(l, state.params.time + dt, values)
}

/// Reference subtracted from G(Δt) before measuring the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderReference {
    /// diag(1 − iΔtE_n/ħ)
    FirstOrder,
    /// The identity; the remainder is then dominated by the linear term.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderFit {
    /// Exponent of ‖G(Δt) − reference‖_F in Δt.
    pub slope: f64,
    pub fit: LineFit,
    pub dts: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Largest rms log-residual accepted as a power law.
const REMAINDER_MAX_RMS: f64 = 0.5;

/// Fits log‖G(Δt) − D(Δt)‖_F against log Δt.
pub fn smallt_remainder_exponent(
    params: &KernelParams,
    modes: usize,
    dts: &[f64],
    reference: RemainderReference,
) -> Result<RemainderFit> {
    let matrices = dts
        .iter()
        .map(|&dt| gmn_matrix(&ZenoSchedule::new(dt, 1, modes)?, params))
        .collect::<Result<Vec<_>>>()?;
    remainder_fit_from_matrices(params, &matrices, reference)
}

/// Same fit as [`smallt_remainder_exponent`] on matrices assembled elsewhere
/// (e.g. in parallel).
pub fn remainder_fit_from_matrices(
    params: &KernelParams,
    matrices: &[ProjectedPropagatorMatrix],
    reference: RemainderReference,
) -> Result<RemainderFit> {
    let dts: Vec<f64> = matrices.iter().map(|g| g.dt).collect();
    let lo = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = dts.iter().cloned().fold(0.0, f64::max);
    if dts.len() < 3 || !(lo > 0.0) || (hi / lo).log10() < 1.5 {
        return Err(Error::domain(
            "dt list needs at least 3 positive values spanning 1.5 decades",
        ));
    }
    let norms: Vec<f64> = matrices
        .iter()
        .map(|g| remainder_norm(g, params, reference))
        .collect();
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|r| r.ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    if fit.rms > REMAINDER_MAX_RMS {
        return Err(Error::degenerate(format!(
            "remainder is not a power law over the dt range (rms log residual {:.3})",
            fit.rms
        )));
    }
    Ok(RemainderFit {
        slope: fit.slope,
        fit,
        dts,
        norms,
    })
}

/// ‖G(Δt) − reference‖_F.
pub fn remainder_norm(
    g: &ProjectedPropagatorMatrix,
    params: &KernelParams,
    reference: RemainderReference,
) -> f64 {
    let m = g.modes();
    let diag: Vec<Complex64> = (1..=m as u64)
        .map(|n| match reference {
            RemainderReference::FirstOrder => {
                Complex64::new(1.0, -g.dt * params.energy(n) / params.hbar)
            }
            RemainderReference::Identity => Complex64::new(1.0, 0.0),
        })
        .collect();
    g.matrix
        .sub(&CMatrix::from_diagonal(&diag))
        .frobenius_norm()
}

/// Spectral states at requested steps and the survival probability after
/// every step.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoTrajectory {
    /// (step k, state after k projections), in ascending k.
    pub checkpoints: Vec<(u64, SpectralState)>,
    /// survival[k] = Σ|c_n|² after k projections; survival[0] is the input norm.
    pub survival: Vec<f64>,
}

/// Applies c ← G(Δt)c N times.
pub fn zeno_evolve(
    state: &SpectralState,
    g: &ProjectedPropagatorMatrix,
    schedule: &ZenoSchedule,
    checkpoints: &[u64],
) -> Result<ZenoTrajectory> {
    if state.modes() != schedule.modes {
        return Err(Error::DimensionMismatch {
            expected: schedule.modes,
            found: state.modes(),
        });
    }
    if g.modes() != schedule.modes {
        return Err(Error::DimensionMismatch {
            expected: schedule.modes,
            found: g.modes(),
        });
    }
    let norm = |c: &[Complex64]| {
        let mut s = NeumaierSum::new();
        for v in c {
            s.add(v.norm_sqr());
        }
        s.value()
    };
    let mut c = state.coeffs.clone();
    let mut survival = Vec::with_capacity(schedule.projections as usize + 1);
    survival.push(norm(&c));
    let mut saved = Vec::new();
    let snapshot = |k: u64, c: &[Complex64]| SpectralState {
        coeffs: c.to_vec(),
        params: state
            .params
            .with_time(state.params.time + k as f64 * schedule.dt),
    };
    if checkpoints.contains(&0) {
        saved.push((0, snapshot(0, &c)));
    }
    for k in 1..=schedule.projections {
        c = g.matrix.mul_vec(&c);
        survival.push(norm(&c));
        if checkpoints.contains(&k) {
            saved.push((k, snapshot(k, &c)));
        }
    }
    Ok(ZenoTrajectory {
        checkpoints: saved,
        survival,
    })
}

/// ⌊T/Δt⌋: the largest image index a path can reach between N projections.
pub fn path_count_bound(schedule: &ZenoSchedule) -> u64 {
    // T = NΔt exactly by construction; the nudge absorbs rounding in T/Δt
    (schedule.total_time() / schedule.dt * (1.0 + 1e-12)).floor() as u64
}

/// ε_N = ħT²/(2mN²L²): the imaginary time shift whose image damping
/// exp(−ε'u²/2|σ|²) reaches e^{−1} at path length u = 2NL.
pub fn epsilon_for_path_cutoff(schedule: &ZenoSchedule, params: &KernelParams) -> f64 {
    let t = schedule.total_time();
    let n = schedule.projections as f64;
    let l = params.box_length;
    params.hbar * t * t / (2.0 * params.mass * n * n * l * l)
}

/// n_cut = 2mL²N/(πħT).
pub fn eigenmode_cutoff(schedule: &ZenoSchedule, params: &KernelParams) -> f64 {
    let l = params.box_length;
    2.0 * params.mass * l * l * schedule.projections as f64
        / (PI * params.hbar * schedule.total_time())
}

/// L/(π n_cut) = ħΔt/(2mL), the smoothing length set by the mode cutoff.
pub fn zeno_smoothing_scale(schedule: &ZenoSchedule, params: &KernelParams) -> f64 {
    params.hbar * schedule.dt / (2.0 * params.mass * params.box_length)
}

/// ‖G^N − diag(e^{−iTE_n/ħ})‖_F restricted to the first `block` modes.
pub fn zeno_limit_deviation(
    g: &ProjectedPropagatorMatrix,
    schedule: &ZenoSchedule,
    params: &KernelParams,
    block: usize,
) -> f64 {
    let power = g.matrix.pow(schedule.projections);
    let t = schedule.total_time();
    let diag: Vec<Complex64> = (1..=block as u64)
        .map(|n| {
            let phase = crate::numerics::wrap_phase(t * params.energy(n) / params.hbar);
            Complex64::new(phase.cos(), -phase.sin())
        })
        .collect();
    power
        .leading_block(block)
        .sub(&CMatrix::from_diagonal(&diag))
        .frobenius_norm()
}
