//! Fractal-dimension estimation from increment scaling and Fourier decay,
//! the analytic mean-square increment of the evolved step, and detection of
//! the crossover between smooth and fractal scaling.
//!
//! A graph of dimension D has ⟨|Δf|²⟩ ∼ Δ^{4−2D}; a Fourier spectrum
//! |a_m|² ∼ m^{−β} gives D = ½(5 − β).

mod analytic;
mod estimate;
mod structure;
mod synthetic;

pub use analytic::{
    analytic_structure_function, scaling_integral, scaling_integral_fraction,
    scaling_integral_oracle,
};
pub use estimate::{
    beta_from_spectrum, crossover_scale, fit_dimension, BetaFit, Crossover, DimensionFit,
    MIN_FIT_POINTS, REGIME_SEPARATION,
};
pub use structure::{
    log_spaced_offsets, mean_square_increment, revival_time_series, structure_function_spatial,
    structure_function_temporal, time_series, Quantity, StructureFunction, TimeSeries,
};
pub use synthetic::synthetic_series;
