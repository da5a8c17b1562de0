//! Special functions and quadrature shared by the propagator code.

pub mod erf;
pub mod fit;
pub mod linalg;
pub mod quad;
pub mod sum;
pub mod theta;

pub use erf::{complex_erf, erfc_scaled_by_exp, faddeeva};
pub use fit::{line_fit, LineFit};
pub use quad::{adaptive_quad, adaptive_quad_vec, QuadResult, QuadVecResult};
pub use sum::{ComplexSum, NeumaierSum};
pub use theta::{
    theta3, theta3_modular_residual, theta3_quasiperiod_residual, ThetaArgs, ThetaValue,
};

/// Reduces an angle into [0, 2π) with the exact floating remainder.
pub fn wrap_phase(x: f64) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    let r = x % tau;
    if r < 0.0 {
        r + tau
    } else {
        r
    }
}
