#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::quad::adaptive_quad_real;
use crate::numerics::NeumaierSum;
use crate::propagators::KernelParams;

/// (2τ/πL) Σ_{|n| ≤ n_max} sin²((x − nL)Δx/2τ)/(x − nL)²: the mean-square
/// increment of the evolved step once the cross terms between different
/// image paths are averaged away.
pub fn analytic_structure_function(
    x: f64,
    params: &KernelParams,
    dx: f64,
    n_max: usize,
) -> Result<f64> {
    params.validate()?;
    let tau = params.tau();
    let l = params.box_length;
    if !(tau > 0.0) {
        return Err(Error::domain("analytic structure function needs t > 0"));
    }
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let nearest = (x / l).round();
    if (x - nearest * l).abs() < 1e-9 * l {
        return Err(Error::domain(alloc::format!(
            "x = {x} sits on the pole at {nearest}·L"
        )));
    }
    let mut acc = NeumaierSum::new();
    let n = n_max as i64;
    for k in -n..=n {
        let d = x - k as f64 * l;
        let s = (d * dx / (2.0 * tau)).sin();
        acc.add(s * s / (d * d));
    }
    Ok(2.0 * tau / (core::f64::consts::PI * l) * acc.value())
}

const TAIL_START: f64 = 400.0;

/// ∫_Y^∞ y^{−β} sin²(y/2) dy by its asymptotic expansion; the cosine part
/// is integrated by parts until the terms fall below 1e-18.
fn tail(beta: f64, y: f64) -> f64 {
    let mean = 0.5 * y.powf(1.0 - beta) / (beta - 1.0);
    // ∫_Y^∞ y^{−β} cos y dy = Σ_k (−1)^{…} (β)_k Y^{−β−k} × {−sin Y, cos Y, sin Y, −cos Y, …}
    let (s, c) = (y.sin(), y.cos());
    let mut osc = 0.0;
    let mut coeff = y.powf(-beta);
    for k in 0..40 {
        let trig = match k % 4 {
            0 => -s,
            1 => c,
            2 => s,
            _ => -c,
        };
        let term = coeff * trig;
        osc += term;
        if term.abs() < 1e-18 {
            break;
        }
        coeff *= (beta + k as f64) / y;
    }
    mean - 0.5 * osc
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 1.0 && beta <= 3.0) {
        return Err(Error::domain(alloc::format!("β = {beta} outside (1, 3]")));
    }
    Ok(())
}

fn integrand(beta: f64) -> impl Fn(f64) -> f64 {
    move |y: f64| {
        let s = (0.5 * y).sin();
        s * s * y.powf(-beta)
    }
}

/// ∫_a^b y^{−β} sin²(y/2) dy for 0 ≤ a < b ≤ ∞ (a = 0 needs β < 3).
pub fn scaling_integral(beta: f64, a: f64, b: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(a >= 0.0 && b > a) || (a == 0.0 && beta >= 3.0) {
        return Err(Error::domain("need 0 ≤ a < b, and a > 0 when β = 3"));
    }
    let f = integrand(beta);
    if b.is_finite() && b <= TAIL_START {
        return Ok(adaptive_quad_real(&f, a, b, 1e-13)?.0);
    }
    let y = TAIL_START.max(a);
    let head = if a < y {
        adaptive_quad_real(&f, a, y, 1e-13)?.0
    } else {
        0.0
    };
    let upper = if b.is_finite() { tail(beta, b) } else { 0.0 };
    Ok(head + tail(beta, y) - upper)
}

/// (Δu)^{β−1} ∫_{Δu}^∞ y^{−β} sin²(y/2) dy.
pub fn scaling_integral_oracle(beta: f64, du: f64) -> Result<f64> {
    if !(du > 0.0 && du.is_finite()) {
        return Err(Error::domain("Δu must be positive"));
    }
    Ok(du.powf(beta - 1.0) * scaling_integral(beta, du, f64::INFINITY)?)
}

/// Share of ∫₀^∞ y^{−β} sin²(y/2) dy carried by [lo, hi] (β < 3).
pub fn scaling_integral_fraction(beta: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(scaling_integral(beta, lo, hi)? / scaling_integral(beta, 0.0, f64::INFINITY)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn total_integral_beta_two() {
        // ∫₀^∞ sin²(y/2)/y² dy = π/4
        let total = scaling_integral(2.0, 0.0, f64::INFINITY).unwrap();
        assert!((total - PI / 4.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn window_carries_three_quarters() {
        let frac = scaling_integral_fraction(2.0, 0.25, 4.0).unwrap();
        assert!(frac > 0.75, "{frac}");
        // the finite window alone, checked against a direct quadrature
        let direct = adaptive_quad_real(|y| ((0.5 * y).sin() / y).powi(2), 0.25, 4.0, 1e-14)
            .unwrap()
            .0;
        assert!((frac * PI / 4.0 - direct).abs() < 1e-10);
    }

    #[test]
    fn tail_expansion_matches_quadrature() {
        for &beta in &[1.5, 2.0, 3.0] {
            let y = 400.0;
            let direct = adaptive_quad_real(integrand(beta), y, 4000.0, 1e-15)
                .unwrap()
                .0;
            let expanded = tail(beta, y) - tail(beta, 4000.0);
            assert!(
                (direct - expanded).abs() < 1e-12,
                "β={beta}: {direct} vs {expanded}"
            );
        }
    }

    #[test]
    fn large_du_tends_to_mean_tail() {
        // for Δu ≥ 10 the factor approaches ½/(β−1) with O(1/Δu) oscillation
        for &beta in &[1.5, 2.0, 2.5] {
            let du = 2000.0;
            let v = scaling_integral_oracle(beta, du).unwrap();
            assert!((v - 0.5 / (beta - 1.0)).abs() < beta / du, "β={beta}: {v}");
        }
    }

    #[test]
    fn oracle_factor_is_monotone() {
        // ∫_{Δu}^∞ y^{−2} sin²(y/2) dy decreases as the lower limit grows
        let mut prev = f64::INFINITY;
        for i in 0..=30 {
            let du = 1e-3 * 1000f64.powf(i as f64 / 30.0);
            let v = scaling_integral(2.0, du, f64::INFINITY).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(scaling_integral_oracle(0.9, 1.0).is_err());
        assert!(scaling_integral_oracle(3.1, 1.0).is_err());
    }

    #[test]
    fn analytic_sf_poles_and_small_dx() {
        let p = KernelParams::natural().with_time(0.1);
        assert!(analytic_structure_function(1.0, &p, 1e-3, 5).is_err());
        assert!(analytic_structure_function(0.3, &p, 1e-3, 0).is_err());
        // few paths: smooth, S/Δx² → (1/2πLτ) Σ 1 = (2n+1)/(2πτ)
        let n = 3;
        for &dx in &[1e-4, 1e-5] {
            let s = analytic_structure_function(0.3, &p, dx, n).unwrap();
            let lead = (2 * n + 1) as f64 / (2.0 * PI * 0.1);
            assert!((s / (dx * dx) - lead).abs() < 1e-3 * lead);
        }
    }

    #[test]
    fn analytic_sf_is_linear_with_many_paths() {
        // with 10⁶ paths the quadratic regime is pushed below Δx ~ τ/(n_max L)
        let p = KernelParams::natural().with_time(0.05);
        let x = 0.3;
        let scales: alloc::vec::Vec<f64> =
            (0..10).map(|i| 1e-3 * 10f64.powf(i as f64 / 9.0)).collect();
        let values: alloc::vec::Vec<f64> = scales
            .iter()
            .map(|&d| analytic_structure_function(x, &p, d, 1_000_000).unwrap())
            .collect();
        let xs: alloc::vec::Vec<f64> = scales.iter().map(|s| s.ln()).collect();
        let ys: alloc::vec::Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let fit = crate::numerics::line_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "{}", fit.slope);

        // against the rescaled integral: the lowest path |x| sets the lower
        // limit y₀ = xΔx/τ and paths are spaced by LΔx/τ
        let ratios: alloc::vec::Vec<f64> = scales
            .iter()
            .zip(&values)
            .map(|(&d, v)| v / (d * scaling_integral(2.0, x * d / p.tau(), f64::INFINITY).unwrap()))
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
        assert!(hi / lo < 1.2, "{ratios:?}");
    }
}
