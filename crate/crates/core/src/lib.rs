//! Numerical core for wavefunction fractality in a one-dimensional box.
//!
//! The crate evaluates the box propagator three ways (eigenfunction sum,
//! image/path sum and Jacobi θ₃ form), evolves states under repeated
//! projective presence measurements (the Zeno box), estimates fractal
//! dimensions from increment scaling, and provides the velocity-limited
//! path sums and telegraph-process simulation used for the Compton cutoff.
//!
//! Everything here is pure computation and builds without `std`
//! (`default-features = false`); an allocator is required. File formats,
//! the experiment runner and parallel sweeps live in the `zenobox` crate.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod fractal;
pub mod numerics;
pub mod propagators;
pub mod relativistic;
pub mod zeno;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use propagators::{KernelParams, SpectralState, WaveField};
