//! Wigner functions of billiard states.
//!
//! Convention: `W(x, p) = (2π)^{-n} ∫ e^{-i p·y} φ*(x - y/2) φ(x + y/2) Ω(x, y) dⁿy`,
//! so that free motion is the shear `W₀(x - p t / m, p)` and `p W / m` is the
//! position flux.
//!
//! Three routes are provided:
//!
//! * [`wigner_direct`]: brute-force quadrature over Ω(x, ·), the oracle;
//! * [`wigner_box_analytic`]: the eigenmode pair expansion, where each pair
//!   contributes a four-term delta comb in `p` shifted onto the kernel
//!   [`g_box`];
//! * [`convolve_p`] on gridded fields, the generic `W₀ *ₚ G` pipeline.

mod analytic;
mod convolution;
mod direct;
mod grid;

pub use analytic::{
    g_box, lambda_nm, wigner_box_analytic, wigner_box_dt, wigner_box_gradient, CombTerm, DeltaComb,
};
pub use convolution::{
    convolve_p, free_wigner, free_wigner_comb_field, free_wigner_field, g_box_field, ShearedField,
};
pub use direct::{wigner_direct, DIRECT_TOLERANCE};
pub use grid::{marginals, trapezoid, Marginals, PhaseSpaceGrid, ScalarField, UniformAxis};

use crate::error::Result;
use crate::exec::Execution;
use crate::geometry::BilliardShape;
use crate::spectral::StateExpansion;

/// Analytic box Wigner function sampled on a one-dimensional phase plane.
pub fn wigner_field(state: &StateExpansion, grid: &PhaseSpaceGrid, t: f64, exec: Execution) -> Result<ScalarField> {
    let values = exec.try_map(grid.len(), |k| {
        let (x, p) = grid.point(k);
        wigner_box_analytic(state, &[x], &[p], t)
    })?;
    ScalarField::new(grid.clone(), values)
}

/// Quadrature-oracle Wigner function sampled on a one-dimensional phase plane.
pub fn wigner_field_direct<S: crate::spectral::WaveFunction>(
    state: &S,
    shape: &BilliardShape,
    grid: &PhaseSpaceGrid,
    t: f64,
    exec: Execution,
) -> Result<ScalarField> {
    let values = exec.try_map(grid.len(), |k| {
        let (x, p) = grid.point(k);
        wigner_direct(state, shape, &[x], &[p], t)
    })?;
    ScalarField::new(grid.clone(), values)
}
