use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Physical context of a propagator evaluation.
///
/// `epsilon` is the imaginary-time regulator in time units; evaluations use
/// the complex time t − iε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub mass: f64,
    pub hbar: f64,
    pub box_length: f64,
    pub time: f64,
    pub epsilon: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self::natural()
    }
}

impl KernelParams {
    /// m = ħ = L = 1, t = 0, ε = 0.
    pub const fn natural() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            box_length: 1.0,
            time: 0.0,
            epsilon: 0.0,
        }
    }

    pub fn new(mass: f64, hbar: f64, box_length: f64, time: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            mass,
            hbar,
            box_length,
            time,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !positive(self.mass) || !positive(self.hbar) || !positive(self.box_length) {
            return Err(Error::domain(
                "mass, hbar and box_length must be positive and finite",
            ));
        }
        if !nonneg(self.time) || !nonneg(self.epsilon) {
            return Err(Error::domain(
                "time and epsilon must be non-negative and finite",
            ));
        }
        Ok(())
    }

    pub fn with_time(self, time: f64) -> Self {
        Self { time, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    /// τ = ħt/m (length²).
    pub fn tau(&self) -> f64 {
        self.hbar * self.time / self.mass
    }

    /// ħ(t − iε)/m, the complex counterpart of τ.
    pub fn complex_tau(&self) -> Complex64 {
        Complex64::new(self.time, -self.epsilon) * (self.hbar / self.mass)
    }

    /// Regulator in length² units, ε' = ħε/m.
    pub fn epsilon_length2(&self) -> f64 {
        self.hbar * self.epsilon / self.mass
    }

    /// E_n = ħ²n²π²/(2mL²).
    pub fn energy(&self, n: u64) -> f64 {
        let n = n as f64;
        self.hbar * self.hbar * n * n * PI * PI
            / (2.0 * self.mass * self.box_length * self.box_length)
    }

    /// Revival period 4mL²/(πħ): every eigenphase returns to 1.
    pub fn revival_time(&self) -> f64 {
        4.0 * self.mass * self.box_length * self.box_length / (PI * self.hbar)
    }

    /// (2mL²/πħ)/√2, an irrational fraction of the revival period. Fractal
    /// measurements use it to stay away from Talbot times, where the evolved
    /// step is piecewise constant.
    pub fn irrational_time(&self) -> f64 {
        2.0 * self.mass * self.box_length * self.box_length
            / (PI * self.hbar)
            / core::f64::consts::SQRT_2
    }

    pub(crate) fn require_regulator(&self, what: &str) -> Result<()> {
        if self.epsilon > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(alloc::format!("{what} needs epsilon > 0")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_energy_natural_units() {
        let p = KernelParams::natural();
        assert!((p.energy(1) - PI * PI / 2.0).abs() < 1e-15);
        assert!((p.energy(1) - 4.9348).abs() < 1e-4);
    }

    #[test]
    fn tau_and_shift() {
        let p = KernelParams::new(2.0, 3.0, 1.0, 0.5, 0.1).unwrap();
        assert_eq!(p.tau(), 0.75);
        assert!((p.complex_tau() - Complex64::new(0.75, -0.15)).norm() < 1e-15);
        assert!(KernelParams::new(-1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(KernelParams::new(1.0, 1.0, 1.0, 0.0, -1.0).is_err());
    }
}
