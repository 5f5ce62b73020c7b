//! Time evolution.
//!
//! - [`field`]: the relativistic Schrödinger field `∂ₜ²ψ = ∇²ψ + 2i∂ₜψ − 2Uψ`,
//!   exactly per Fourier mode or with a second-order stepper.
//! - [`density`]: linearized density perturbations of the dissipative models,
//!   exactly per mode from the dispersion roots, with an RK4 cross-check.
//! - [`fit`]: single-exponential frequency fits used to measure trajectories.

pub mod density;
pub mod field;
pub mod fit;

pub use density::{evolve_density, rk4_density_mode, DensityModeState, ModePropagator};
pub use field::{
    conservative_mode_frequencies, evolve_field, gapped_coefficients, particle_branch_project, propagate_exact,
    EvolutionConfig, FieldEvolution, FieldState, Method,
};
pub use fit::{fit_mode_frequency, FrequencyFit};
