//! Box and free-line propagators, the Dirichlet basis and spectral
//! evolution of states expanded in it.
//!
//! All real-time evaluations go through one complex-time convention:
//! t → t − iε is applied first, and every derived quantity (τ = ħt/m, the θ₃
//! parameter, the image damping) is computed from the shifted time.

mod box_kernel;
mod kernel;
mod modes;
mod params;
mod spectral;

pub use box_kernel::{
    box_evolve_constant_images, box_propagator_eigsum, box_propagator_imagesum,
    box_propagator_theta, derivative_series, eigsum_mode_count, image_cutoff, ImageTruncation,
};
pub use kernel::{
    free_kernel, free_kernel_complex, free_line_derivative, free_line_evolve_constant,
    gaussian_segment,
};
pub use modes::{dirichlet_mode, DirichletMode};
pub use params::KernelParams;
pub use spectral::{
    evolve_spectral, project_constant_state, sample_wavefield, sine_table, SpectralState,
    WaveField, ZenoDamping,
};
