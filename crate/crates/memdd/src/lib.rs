//! Finite-volume solver and diagnostics for a degenerate drift-diffusion
//! model of memristive devices: electron, hole, and oxygen-vacancy densities
//! with power-law (degenerate) diffusion, coupled to a Poisson equation for
//! the electric potential.
//!
//! The crate is organised around:
//!
//! - [`mesh`]: uniform tensor-product finite-volume meshes (1D, 2D),
//! - [`model`]: parameters, boundary data, and simulation state,
//! - [`cutoff`]: the clamped-density family and its entropy primitives used
//!   by the truncated scheme,
//! - [`poisson`]: the discrete Poisson solve for the potential,
//! - [`transport`]: entropy-variable fluxes, the fully coupled backward-Euler
//!   step with damped Newton, and contact currents,
//! - [`diagnostics`]: free energy, dissipation, relative entropy, norms, and
//!   the exponent bookkeeping behind the integrability and iteration bounds.

pub mod banded;
pub mod cutoff;
pub mod diagnostics;
pub mod error;
pub mod mesh;
pub mod model;
pub mod par;
pub mod poisson;
pub mod transport;

pub use error::{Error, Result};
