//! The box propagator in its eigenfunction, image (path) and θ₃ forms, plus
//! the image-sum evolution of the constant state and its derivative series.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::kernel::{free_kernel_complex, gaussian_segment};
use super::params::KernelParams;
use crate::error::{Error, Result};
use crate::numerics::sum::ComplexSum;
use crate::numerics::theta3;

/// Relative tail target for the eigenfunction sum.
const EIGSUM_TAIL: f64 = 1e-12;
/// Damping level below which image terms are dropped under `Auto`.
const IMAGE_THRESHOLD: f64 = 1e-14;
const THETA_TOL: f64 = 1e-16;

/// How an image sum is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageTruncation {
    /// Keep |n| ≤ n_max, whatever the regulator.
    Hard(usize),
    /// Keep every image whose complex-time damping exceeds 1e-14 (needs ε > 0).
    Auto,
}

fn check_point(x: f64, l: f64, name: &str) -> Result<()> {
    if !(x.is_finite() && (0.0..=l).contains(&x)) {
        return Err(Error::domain(alloc::format!(
            "{name} = {x} lies outside [0, L]"
        )));
    }
    Ok(())
}

/// Number of modes after which Σ_{n>M} e^{−εE_n/ħ} drops below
/// `rel_tol · 1/L` (in units of the 2/L mode prefactor).
pub fn eigsum_mode_count(params: &KernelParams, rel_tol: f64) -> Result<usize> {
    params.validate()?;
    params.require_regulator("the eigenfunction sum")?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::domain("rel_tol must lie in (0, 1)"));
    }
    let a = params.epsilon * params.energy(1) / params.hbar;
    let n = ((-(rel_tol * (1.0 - (-a).exp()) / 2.0).ln()) / a)
        .sqrt()
        .ceil();
    if n > 1e9 {
        return Err(Error::Budget {
            what: "eigenfunction mode count".into(),
            estimate: n,
            error_estimate: f64::NAN,
        });
    }
    Ok((n as usize).max(1))
}

/// Σ_{n ≤ M} (2/L) sin(nπx/L) sin(nπy/L) e^{−i(t−iε)E_n/ħ}.
///
/// Summation stops early once the Gaussian tail bound is below 1e-12 of
/// max(|partial|, 1/L); if `max_modes` is reached first the result is a
/// budget error carrying the partial sum.
pub fn box_propagator_eigsum(
    x: f64,
    y: f64,
    params: &KernelParams,
    max_modes: usize,
) -> Result<Complex64> {
    params.validate()?;
    params.require_regulator("the eigenfunction sum")?;
    let l = params.box_length;
    check_point(x, l, "x")?;
    check_point(y, l, "y")?;
    // exponent of mode n is −(ε + it) ω n² with ω = E_1/ħ
    let omega = params.energy(1) / params.hbar;
    let a = params.epsilon * omega;
    let tail_ratio = 1.0 / (1.0 - (-a).exp());
    let mut acc = ComplexSum::new();
    for n in 1..=max_modes as u64 {
        let nn = (n * n) as f64;
        let phase = crate::numerics::wrap_phase(params.time * omega * nn);
        let amp = (-a * nn).exp();
        let sx = (n as f64 * PI * x / l).sin();
        let sy = (n as f64 * PI * y / l).sin();
        acc.add(Complex64::from_polar(amp * sx * sy * 2.0 / l, -phase));
        let next = ((n + 1) * (n + 1)) as f64;
        let tail = (2.0 / l) * (-a * next).exp() * tail_ratio;
        if tail <= EIGSUM_TAIL * acc.value().norm().max(1.0 / l) {
            return Ok(acc.value());
        }
    }
    let partial = acc.value();
    let next = ((max_modes + 1) * (max_modes + 1)) as f64;
    Err(Error::Budget {
        what: "eigenfunction sum mode cap".into(),
        estimate: partial.norm(),
        error_estimate: (2.0 / l) * (-a * next).exp() * tail_ratio,
    })
}

/// Smallest n_max such that every image with |n| > n_max carries damping
/// exp(−ε'u²/2|σ|²) below `threshold`, where u ≥ 2(|n| − 1)L is the
/// shortest path length of the n-th image pair.
pub fn image_cutoff(params: &KernelParams, threshold: f64) -> Result<usize> {
    params.validate()?;
    params.require_regulator("an automatic image cutoff")?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::domain("threshold must lie in (0, 1)"));
    }
    let sigma = params.complex_tau();
    let eps = params.epsilon_length2();
    let u = (2.0 * sigma.norm_sqr() * (-threshold.ln()) / eps).sqrt();
    let n = (u / (2.0 * params.box_length)).ceil() + 1.0;
    if n > 1e8 {
        return Err(Error::Budget {
            what: "image cutoff".into(),
            estimate: n,
            error_estimate: f64::NAN,
        });
    }
    Ok(n as usize)
}

fn resolve(truncation: ImageTruncation, params: &KernelParams) -> Result<i64> {
    match truncation {
        ImageTruncation::Hard(n) => {
            if params.time == 0.0 && params.epsilon == 0.0 {
                return Err(Error::domain("image sums need t > 0 or epsilon > 0"));
            }
            Ok(n as i64)
        }
        ImageTruncation::Auto => Ok(image_cutoff(params, IMAGE_THRESHOLD)? as i64),
    }
}

/// Σ_{|n| ≤ n_max} [g(x−y−2nL, σ) − g(x+y−2nL, σ)] with σ = ħ(t − iε)/m.
///
/// The regulator enters only through σ, so each term carries the gradual
/// damping exp(−ε'u²/2|σ|²) automatically.
pub fn box_propagator_imagesum(
    x: f64,
    y: f64,
    params: &KernelParams,
    truncation: ImageTruncation,
) -> Result<Complex64> {
    params.validate()?;
    let l = params.box_length;
    check_point(x, l, "x")?;
    check_point(y, l, "y")?;
    let n_max = resolve(truncation, params)?;
    let sigma = params.complex_tau();
    let mut acc = ComplexSum::new();
    for n in -n_max..=n_max {
        let shift = 2.0 * n as f64 * l;
        acc.add(free_kernel_complex(x - y - shift, sigma)?);
        acc.add(-free_kernel_complex(x + y - shift, sigma)?);
    }
    Ok(acc.value())
}

/// (1/2L)[θ₃(π(x−y)/2L, σ) − θ₃(π(x+y)/2L, σ)], σ = −πħ(t−iε)/(2mL²).
pub fn box_propagator_theta(x: f64, y: f64, params: &KernelParams) -> Result<Complex64> {
    params.validate()?;
    let l = params.box_length;
    check_point(x, l, "x")?;
    check_point(y, l, "y")?;
    let sigma = -params.complex_tau() * (PI / (2.0 * l * l));
    if !(sigma.im > 0.0) {
        return Err(Error::domain("theta form needs epsilon > 0 (Im σ > 0)"));
    }
    let z = |u: f64| Complex64::new(PI * u / (2.0 * l), 0.0);
    let a = theta3(z(x - y), sigma, THETA_TOL)?.value;
    let b = theta3(z(x + y), sigma, THETA_TOL)?.value;
    Ok((a - b) / (2.0 * l))
}

/// ψ(x, t) for ψ₀ = 1/√L evolved in the box, by integrating the image sum
/// in closed form:
/// (1/2√L) Σₙ [erfc(κ(x−(2n+1)L)) + erfc(κ(x−(2n−1)L)) − 2 erfc(κ(x−2nL))].
pub fn box_evolve_constant_images(
    x: f64,
    params: &KernelParams,
    truncation: ImageTruncation,
) -> Result<Complex64> {
    params.validate()?;
    let n_max = resolve(truncation, params)?;
    let sigma = params.complex_tau();
    let l = params.box_length;
    let mut acc = ComplexSum::new();
    for n in -n_max..=n_max {
        let c = x - 2.0 * n as f64 * l;
        acc.add(gaussian_segment(sigma, 0.0, x, c - l, c)?);
        acc.add(-gaussian_segment(sigma, 0.0, x, c, c + l)?);
    }
    Ok(acc.value() / l.sqrt())
}

/// ∂ψ/∂x of the box-evolved constant state as the alternating series
/// (2/√L) Σ_{|k| ≤ k_max} (−1)ᵏ g(x − kL, σ).
///
/// Each image pair contributes 2g(x−2nL) − g(x−(2n+1)L) − g(x−(2n−1)L);
/// every odd k is reached from two neighbouring pairs, hence the uniform 2.
/// Under `Auto` the k-range covers the same images as the propagator cutoff.
pub fn derivative_series(
    x: f64,
    params: &KernelParams,
    truncation: ImageTruncation,
) -> Result<Complex64> {
    params.validate()?;
    let k_max = match truncation {
        ImageTruncation::Hard(k) => resolve(ImageTruncation::Hard(k), params)?,
        ImageTruncation::Auto => 2 * resolve(truncation, params)? + 1,
    };
    let sigma = params.complex_tau();
    let l = params.box_length;
    let mut acc = ComplexSum::new();
    for k in -k_max..=k_max {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        acc.add(free_kernel_complex(x - k as f64 * l, sigma)? * sign);
    }
    Ok(acc.value() * (2.0 / l.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::adaptive_quad;
    use proptest::prelude::*;

    fn reg(t: f64, eps: f64) -> KernelParams {
        KernelParams::natural().with_time(t).with_epsilon(eps)
    }

    #[test]
    fn eigsum_dirichlet_and_symmetry() {
        let p = reg(0.2, 0.05);
        assert_eq!(
            box_propagator_eigsum(0.0, 0.4, &p, 10_000).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let a = box_propagator_eigsum(0.3, 0.7, &p, 10_000).unwrap();
        let b = box_propagator_eigsum(0.7, 0.3, &p, 10_000).unwrap();
        assert!((a - b).norm() < 1e-15);
        assert!(box_propagator_eigsum(0.3, 0.7, &reg(0.2, 0.0), 100).is_err());
        assert!(box_propagator_eigsum(0.3, 0.7, &reg(0.2, 1e-6), 10)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn eigsum_is_delta_like_near_zero_time() {
        let p = reg(0.0, 1e-3);
        let m = eigsum_mode_count(&p, 1e-12).unwrap();
        for &x in &[0.3, 0.5, 0.8] {
            let r = adaptive_quad(
                |y| box_propagator_eigsum(x, y, &p, m).unwrap(),
                0.0,
                1.0,
                1e-10,
            )
            .unwrap();
            assert!((r.value - 1.0).norm() < 1e-3, "x={x}: {}", r.value);
        }
    }

    #[test]
    fn three_forms_agree_at_reference_point() {
        let p = reg(0.2, 0.05);
        let th = box_propagator_theta(0.3, 0.6, &p).unwrap();
        let im = box_propagator_imagesum(0.3, 0.6, &p, ImageTruncation::Auto).unwrap();
        let eg = box_propagator_eigsum(0.3, 0.6, &p, 100_000).unwrap();
        assert!((th - im).norm() < 1e-10, "{th} vs {im}");
        assert!((th - eg).norm() < 1e-10, "{th} vs {eg}");
    }

    #[test]
    fn single_path_dominates_in_a_wide_box() {
        // n_max = 0 leaves g(x−y) − g(x+y); with the pair placed deep inside a
        // wide box and a small regulator the reflected term is negligible.
        let p = KernelParams {
            box_length: 200.0,
            ..reg(0.5, 0.05)
        };
        let (x, y) = (100.2, 99.9);
        let g = box_propagator_imagesum(x, y, &p, ImageTruncation::Hard(0)).unwrap();
        let free = free_kernel_complex(x - y, p.complex_tau()).unwrap();
        assert!((g - free).norm() < 1e-12 * free.norm());
    }

    #[test]
    fn second_image_has_path_length_four_l() {
        // The n = 2 reflected term: g(x + y − 4L), phase i(x+y−4L)²/2τ.
        let p = reg(0.3, 0.0);
        let (x, y) = (0.3, 0.45);
        let two = box_propagator_imagesum(x, y, &p, ImageTruncation::Hard(2)).unwrap();
        let one = box_propagator_imagesum(x, y, &p, ImageTruncation::Hard(1)).unwrap();
        let direct_n2 = free_kernel_complex(x - y - 4.0, p.complex_tau()).unwrap();
        let direct_nm2 = free_kernel_complex(x - y + 4.0, p.complex_tau()).unwrap();
        let reflected_nm2 = free_kernel_complex(x + y + 4.0, p.complex_tau()).unwrap();
        let reflected_n2 = two - one - direct_n2 - direct_nm2 + reflected_nm2;
        let path = 4.0 - x - y;
        let expected = -(Complex64::new(0.0, path * path / (2.0 * 0.3))).exp()
            / (Complex64::new(0.0, 2.0 * PI * 0.3)).sqrt();
        assert!((reflected_n2 - expected).norm() < 1e-13);
    }

    #[test]
    fn theta_form_rejects_zero_regulator_and_vanishes_at_y0() {
        assert!(box_propagator_theta(0.3, 0.6, &reg(0.2, 0.0)).is_err());
        let g = box_propagator_theta(0.4, 0.0, &reg(0.2, 0.05)).unwrap();
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn image_cutoff_requires_regulator() {
        assert!(image_cutoff(&reg(0.2, 0.0), 1e-14).is_err());
        assert!(box_propagator_imagesum(0.3, 0.4, &reg(0.2, 0.0), ImageTruncation::Auto).is_err());
        assert!(
            box_propagator_imagesum(0.3, 0.4, &reg(0.0, 0.0), ImageTruncation::Hard(3)).is_err()
        );
        let n = image_cutoff(&reg(0.2, 0.05), 1e-14).unwrap();
        assert!((2..20).contains(&n), "{n}");
    }

    #[test]
    fn leading_derivative_term() {
        let p = reg(0.1, 0.05);
        let d = derivative_series(0.37, &p, ImageTruncation::Hard(0)).unwrap();
        let g = free_kernel_complex(0.37, p.complex_tau()).unwrap();
        assert!((d - g * 2.0).norm() < 1e-15);
    }

    #[test]
    fn derivative_reflection_pattern() {
        let p = reg(0.2, 0.05);
        for &x in &[0.1, 0.33, 0.71] {
            let d = derivative_series(x, &p, ImageTruncation::Auto).unwrap();
            let mirrored = derivative_series(1.0 - x, &p, ImageTruncation::Auto).unwrap();
            let shifted = derivative_series(2.0 - x, &p, ImageTruncation::Auto).unwrap();
            assert!((d + mirrored).norm() < 1e-12, "L − x");
            assert!((d - shifted).norm() < 1e-12, "2L − x");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = reg(0.2, 0.05);
        let h = 1e-5;
        for &x in &[0.15, 0.4, 0.9] {
            let fd = (box_evolve_constant_images(x + h, &p, ImageTruncation::Auto).unwrap()
                - box_evolve_constant_images(x - h, &p, ImageTruncation::Auto).unwrap())
                / (2.0 * h);
            let series = derivative_series(x, &p, ImageTruncation::Auto).unwrap();
            assert!((fd - series).norm() < 1e-6, "x={x}: {fd} vs {series}");
        }
    }

    #[test]
    fn image_evolution_matches_spectral_synthesis() {
        let p = reg(0.13, 0.02);
        let psi = box_evolve_constant_images(0.27, &p, ImageTruncation::Auto).unwrap();
        // Σ c_n u_n(x) e^{−i(t−iε)E_n}
        let mut acc = ComplexSum::new();
        for n in (1..4000u64).step_by(2) {
            let c = 2.0 * 2f64.sqrt() / (n as f64 * PI);
            let e = p.energy(n);
            let amp = c * 2f64.sqrt() * (n as f64 * PI * 0.27).sin() * (-p.epsilon * e).exp();
            acc.add(Complex64::from_polar(
                amp,
                -crate::numerics::wrap_phase(p.time * e),
            ));
        }
        assert!(
            (psi - acc.value()).norm() < 1e-10,
            "{psi} vs {}",
            acc.value()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn representations_agree(x in 0.01f64..0.99, y in 0.01f64..0.99, t in 0.01f64..1.0, eps in 0.02f64..0.3) {
            let p = reg(t, eps);
            let th = box_propagator_theta(x, y, &p).unwrap();
            let im = box_propagator_imagesum(x, y, &p, ImageTruncation::Auto).unwrap();
            let eg = box_propagator_eigsum(x, y, &p, 100_000).unwrap();
            prop_assert!((th - im).norm() < 1e-8, "theta {} images {}", th, im);
            prop_assert!((th - eg).norm() < 1e-8, "theta {} eigsum {}", th, eg);
        }

        #[test]
        fn dirichlet_walls(y in 0.01f64..0.99, t in 0.01f64..1.0, eps in 0.02f64..0.3) {
            let p = reg(t, eps);
            let interior = box_propagator_theta(0.5, y, &p).unwrap().norm().max(1e-300);
            for wall in [0.0, 1.0] {
                let vals = [
                    box_propagator_theta(wall, y, &p).unwrap(),
                    box_propagator_imagesum(wall, y, &p, ImageTruncation::Auto).unwrap(),
                    box_propagator_eigsum(wall, y, &p, 100_000).unwrap(),
                ];
                for v in vals {
                    prop_assert!(v.norm() <= 1e-9 * interior, "wall {} value {}", wall, v);
                }
            }
        }
    }
}
