//! FFT sine synthesis of spectral states on a uniform grid.

use rustfft::FftPlanner;
use zenobox_core::{Complex64, Result, SpectralState, WaveField};

/// ψ(x_j) = √(2/L) Σₙ cₙ sin(nπj/K) for j = 0..=K, with K = `intervals`.
///
/// Mode n is folded onto n mod 2K (sin is 2K-periodic in n), then one inverse
/// FFT of length 2K gives B_j = Σ a_r e^{iπrj/K} and
/// ψ_j ∝ (B_j − B_{2K−j})/2i. The wall samples are exactly zero.
pub fn synthesize(state: &SpectralState, intervals: usize) -> Result<WaveField> {
    if intervals < 1 {
        return Err(zenobox_core::Error::Domain(
            "grid needs at least one interval".into(),
        ));
    }
    let k = intervals;
    let len = 2 * k;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, c) in state.coeffs.iter().enumerate() {
        let r = (i + 1) % len;
        buf[r] += *c;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    let scale = (2.0 / state.params.box_length).sqrt();
    let half_i = Complex64::new(0.0, -0.5);
    let values = (0..=k)
        .map(|j| {
            if j == 0 || j == k {
                return Complex64::new(0.0, 0.0);
            }
            (buf[j] - buf[len - j]) * half_i * scale
        })
        .collect();
    WaveField::new(state.params.box_length, state.params.time, values)
}

/// ψ(x, jT_rev/S) for j < S = `resolution` over one revival period
/// T_rev = 4mL²/(πħ). Mode n has phase e^{−2πi n²j/S}, so binning the
/// amplitudes by n² mod S turns the series into one forward FFT of length S.
pub fn revival_series(state: &SpectralState, x: f64, resolution: usize) -> Result<Vec<Complex64>> {
    let l = state.params.box_length;
    if !(x > 0.0 && x < l) {
        return Err(zenobox_core::Error::Domain(
            "time series position must be interior".into(),
        ));
    }
    if resolution < 4 {
        return Err(zenobox_core::Error::Domain(
            "time series needs at least 4 samples".into(),
        ));
    }
    let s = resolution as u64;
    let scale = (2.0 / l).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); resolution];
    for (i, c) in state.coeffs.iter().enumerate() {
        let n = (i + 1) as u64;
        let r = ((n % s) * (n % s) % s) as usize;
        buf[r] += *c * scale * (n as f64 * std::f64::consts::PI * x / l).sin();
    }
    FftPlanner::new()
        .plan_fft_forward(resolution)
        .process(&mut buf);
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use zenobox_core::fractal::revival_time_series;
    use zenobox_core::propagators::{evolve_spectral, project_constant_state, sample_wavefield};
    use zenobox_core::KernelParams;

    fn max_abs_diff(a: &WaveField, b: &WaveField) -> f64 {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_direct_synthesis() {
        let p = KernelParams::natural();
        let s = evolve_spectral(&project_constant_state(300, &p).unwrap(), 0.3271, None).unwrap();
        let direct = sample_wavefield(&s, 1025).unwrap();
        let fast = synthesize(&s, 1024).unwrap();
        assert_eq!(fast.len(), direct.len());
        assert!(max_abs_diff(&fast, &direct) < 1e-10);
    }

    #[test]
    fn aliased_modes_fold_like_direct_synthesis() {
        // 300 modes on 64 intervals: every mode above 64 aliases
        let p = KernelParams::natural();
        let s = evolve_spectral(&project_constant_state(300, &p).unwrap(), 0.21, None).unwrap();
        let direct = sample_wavefield(&s, 65).unwrap();
        let fast = synthesize(&s, 64).unwrap();
        assert!(max_abs_diff(&fast, &direct) < 1e-10);
    }

    #[test]
    fn single_mode_is_a_sine() {
        let p = KernelParams::natural();
        let s = SpectralState::eigenmode(3, 8, p).unwrap();
        let f = synthesize(&s, 16).unwrap();
        for j in 0..=16 {
            let want = 2f64.sqrt() * (3.0 * PI * j as f64 / 16.0).sin();
            assert!((f.values[j] - Complex64::new(want, 0.0)).norm() < 1e-14);
        }
        assert_eq!(f.values[0], Complex64::new(0.0, 0.0));
        assert_eq!(f.values[16], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn revival_series_matches_direct_synthesis() {
        let p = KernelParams::natural();
        let s = project_constant_state(21, &p).unwrap();
        let direct = revival_time_series(&s, 0.37, 1024).unwrap();
        let fast = revival_series(&s, 0.37, 1024).unwrap();
        let worst = direct
            .values
            .iter()
            .zip(&fast)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn revival_series_single_mode() {
        let p = KernelParams::natural();
        let mut a = vec![Complex64::new(0.0, 0.0); 9];
        a[2] = Complex64::new(1.0, 0.0);
        let s = SpectralState::new(a, p).unwrap();
        let v = revival_series(&s, 0.5, 8).unwrap();
        // n = 3: n² mod 8 = 1, sin(3π/2) = −1
        for (j, z) in v.iter().enumerate() {
            let ph = -2.0 * PI * j as f64 / 8.0;
            let want = Complex64::new(ph.cos(), ph.sin()) * -(2f64.sqrt());
            assert!((z - want).norm() < 1e-14);
        }
    }
}
