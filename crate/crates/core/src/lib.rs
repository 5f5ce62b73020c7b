//! Numerical workbench for the relativistic Schrödinger field
//! `□ψ − 2i ∂ₜψ = 0` (Compton units, ħ = m = c = 1), its Madelung
//! decomposition into density and phase, and the dispersion relations of
//! three dissipative extensions of the quantum Hamilton-Jacobi equation.
//!
//! Module map:
//!
//! - [`units`]: Compton unit scales and model parameters.
//! - [`poly`]: certified roots of complex polynomials up to degree four.
//! - [`dispersion`]: dispersion polynomials, asymptotes, branch tracking.
//! - [`grid`]: periodic 1-D grid, unitary DFT, spectral derivatives.
//! - [`evolve`]: field and linearized density evolution.
//! - [`madelung`]: `ψ → (ρ, S)`, quantum potential, residuals, charges.
//! - [`spectrum`]: nonrelativistic eigenvalues and the relativistic energy map.
//! - `cli` (feature `cli`): config loading and the batch front end.
// `!(x > 0.0)` is used deliberately so NaN falls into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod madelung;
pub mod poly;
pub mod spectrum;
pub mod units;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64;
