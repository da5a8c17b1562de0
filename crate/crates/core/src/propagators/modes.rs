use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::params::KernelParams;
use crate::error::{Error, Result};

/// Dirichlet eigenfunction u_n(x) = √(2/L) sin(nπx/L) with its energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletMode {
    pub n: u64,
    pub box_length: f64,
    pub energy: f64,
}

impl DirichletMode {
    pub fn value(&self, x: f64) -> f64 {
        (2.0 / self.box_length).sqrt() * (self.n as f64 * PI * x / self.box_length).sin()
    }

    pub fn wavenumber(&self) -> f64 {
        self.n as f64 * PI / self.box_length
    }
}

pub fn dirichlet_mode(n: u64, params: &KernelParams) -> Result<DirichletMode> {
    if n < 1 {
        return Err(Error::domain("Dirichlet modes are indexed from n = 1"));
    }
    params.validate()?;
    Ok(DirichletMode {
        n,
        box_length: params.box_length,
        energy: params.energy(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::adaptive_quad_real;

    #[test]
    fn orthonormal() {
        let p = KernelParams::natural().with_time(0.0);
        let p = KernelParams {
            box_length: 1.7,
            ..p
        };
        for m in 1..=5 {
            for n in 1..=5 {
                let um = dirichlet_mode(m, &p).unwrap();
                let un = dirichlet_mode(n, &p).unwrap();
                let (v, _) =
                    adaptive_quad_real(|x| um.value(x) * un.value(x), 0.0, 1.7, 1e-13).unwrap();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-10, "({m},{n}) -> {v}");
            }
        }
    }

    #[test]
    fn vanishes_on_walls_and_rejects_zero() {
        let p = KernelParams::natural();
        let u = dirichlet_mode(7, &p).unwrap();
        assert_eq!(u.value(0.0), 0.0);
        assert!(u.value(1.0).abs() < 1e-14);
        assert!(dirichlet_mode(0, &p).is_err());
        assert!((dirichlet_mode(1, &p).unwrap().energy - 4.9348).abs() < 1e-4);
    }
}
