//! Wigner functions, phase-space currents and boundary identities for
//! particles in hard-wall billiards.
//!
//! Units have ħ = 1. The reference billiard is the box `[-1, 1]^n`; its
//! eigenstates and superpositions live in [`spectral`], Wigner functions in
//! [`wigner`], and fluxes and the equation of motion in [`current`].
//! Grid assembly runs on rayon unless the `parallel` feature is disabled;
//! see [`exec::Execution`].

pub mod contour;
pub mod current;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod quadrature;
pub mod spectral;
pub mod wigner;

pub use error::{Error, Result};
