//! Jacobi θ₃ by direct summation of θ₃(z, s) = Σₙ exp(iπ s n² + 2i z n).
//!
//! The series is summed outward from the index of the largest term, so it
//! stays accurate when Im z shifts the peak far from n = 0 (as happens on
//! the modular side of the transformation). Each direction stops once a
//! geometric bound on the remaining tail falls below `tol · |partial sum|`.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::sum::ComplexSum;
use crate::error::{Error, Result};

const TERM_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    pub z: Complex64,
    /// Modular parameter; the series converges for Im s > 0.
    pub s: Complex64,
    /// Relative tolerance on the truncated tail.
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Number of series terms summed.
    pub terms: usize,
}

impl ThetaArgs {
    pub fn new(z: Complex64, s: Complex64, tol: f64) -> Self {
        Self { z, s, tol }
    }

    pub fn evaluate(&self) -> Result<ThetaValue> {
        theta3(self.z, self.s, self.tol)
    }
}

/// θ₃(z, s) with Im s > 0.
///
/// Boundary values Im s = 0 are not evaluated; callers shift s into the
/// upper half plane (s → s + iδ) and carry δ themselves.
pub fn theta3(z: Complex64, s: Complex64, tol: f64) -> Result<ThetaValue> {
    if !(s.im > 0.0) {
        return Err(Error::domain(alloc::format!(
            "theta3 needs Im s > 0, got s = {s}"
        )));
    }
    if !(tol > 0.0) || !z.re.is_finite() || !z.im.is_finite() || !s.re.is_finite() {
        return Err(Error::domain("theta3 needs finite z, s and tol > 0"));
    }
    let a = PI * s.im;
    let b = 2.0 * z.im;
    // log|term(n)| = -a n² - b n peaks at n = -b / 2a
    let center = (-b / (2.0 * a)).round();
    if center.abs() > 1e9 {
        return Err(Error::Range(alloc::format!(
            "theta3 peak index {center:e} out of range"
        )));
    }
    let center = center as i64;

    let term = |n: i64| -> Result<Complex64> {
        let nf = n as f64;
        let arg = Complex64::new(0.0, PI) * s * (nf * nf) + Complex64::new(0.0, 2.0) * z * nf;
        if arg.re > 700.0 {
            return Err(Error::Range(alloc::format!("theta3 term {n} overflows")));
        }
        Ok(arg.exp())
    };
    // |t(n+1)/t(n)| for n on the far side of the peak
    let ratio = |n: i64, dir: f64| -> f64 {
        let nf = n as f64;
        (-(a * (2.0 * dir * nf + 1.0) + dir * b)).exp()
    };

    let mut acc = ComplexSum::new();
    acc.add(term(center)?);
    let mut terms = 1usize;
    for dir in [1i64, -1] {
        let mut n = center;
        loop {
            n += dir;
            let t = term(n)?;
            acc.add(t);
            terms += 1;
            let q = ratio(n, dir as f64);
            if q < 1.0 {
                let tail = t.norm() * q / (1.0 - q);
                if tail <= 0.5 * tol * acc.value().norm() || tail == 0.0 {
                    break;
                }
            }
            if terms > TERM_BUDGET {
                return Err(Error::Budget {
                    what: "theta3 series".into(),
                    estimate: acc.value().re,
                    error_estimate: t.norm(),
                });
            }
        }
    }
    Ok(ThetaValue {
        value: acc.value(),
        terms,
    })
}

/// |θ₃(z, s) − (−is)^{−1/2} e^{z²/(iπs)} θ₃(z/s, −1/s)|.
///
/// (−is)^{−1/2} is the principal root (positive real part), which is the
/// branch that makes the identity hold at the self-dual point s = i.
pub fn theta3_modular_residual(z: Complex64, s: Complex64) -> Result<f64> {
    let tol = 1e-16;
    let lhs = theta3(z, s, tol)?.value;
    let rhs = modular_image(z, s, tol)?;
    Ok((lhs - rhs).norm())
}

/// Right-hand side of the modular transformation, evaluated on the dual
/// parameter −1/s.
pub fn modular_image(z: Complex64, s: Complex64, tol: f64) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let prefactor = (-i * s).sqrt().inv();
    let gauss = z * z / (i * PI * s);
    if gauss.re > 700.0 {
        return Err(Error::Range("modular prefactor overflows".into()));
    }
    let dual = theta3(z / s, -s.inv(), tol)?.value;
    Ok(prefactor * gauss.exp() * dual)
}

/// |θ₃(z + πs, s) − e^{−iπs − 2iz} θ₃(z, s)|.
pub fn theta3_quasiperiod_residual(z: Complex64, s: Complex64, tol: f64) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let shifted = theta3(z + s * PI, s, tol)?.value;
    let base = theta3(z, s, tol)?.value;
    let factor = (-i * PI * s - i * 2.0 * z).exp();
    Ok((shifted - factor * base).norm())
}
