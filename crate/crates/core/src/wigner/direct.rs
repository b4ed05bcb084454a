use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BilliardShape, OmegaRegion, Point2};
use crate::quadrature::GaussLegendre;
use crate::spectral::WaveFunction;

/// Largest accepted change under panel doubling, and largest accepted
/// imaginary part of the oracle.
pub const DIRECT_TOLERANCE: f64 = 1e-8;

const PANEL_ORDER: usize = 24;
const TARGET_CHANGE: f64 = 1e-13;

/// Wigner function by direct quadrature of its defining integral over the
/// support Ω(x, ·).
///
/// Gauss–Legendre panels are doubled until successive estimates agree to
/// `1e-13`; the result is accepted if the final change is at most
/// [`DIRECT_TOLERANCE`].
pub fn wigner_direct<S>(state: &S, shape: &BilliardShape, x: &[f64], p: &[f64], t: f64) -> Result<f64>
where
    S: WaveFunction + ?Sized,
{
    let dim = shape.dim();
    if x.len() != dim || p.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len().min(p.len()),
        });
    }
    let region = shape.omega_region(x);
    let integrand = |y: &[f64]| -> Complex64 {
        let phase: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, -phase) * state.f(x, y, t)
    };
    let gl = GaussLegendre::new(PANEL_ORDER);
    let max_panels = match dim {
        1 => 512,
        2 => 32,
        _ => 8,
    };
    let estimate = |panels: usize| -> Complex64 {
        match &region {
            OmegaRegion::Empty => Complex64::new(0.0, 0.0),
            OmegaRegion::Box { half } => integrate_box(&gl, half, panels, &integrand),
            OmegaRegion::Polygon(v) => integrate_polygon(&gl, v, panels, &integrand),
        }
    };
    if region == OmegaRegion::Empty || region.measure() == 0.0 {
        return Ok(0.0);
    }
    let mut panels = 1;
    let mut prev = estimate(panels);
    let value = loop {
        panels *= 2;
        let cur = estimate(panels);
        let change = (cur - prev).norm();
        if change <= TARGET_CHANGE {
            break cur;
        }
        if panels >= max_panels {
            if change > DIRECT_TOLERANCE {
                return Err(Error::QuadratureNotConverged {
                    change,
                    tolerance: DIRECT_TOLERANCE,
                });
            }
            break cur;
        }
        prev = cur;
    };
    let value = value / (2.0 * PI).powi(dim as i32);
    if value.im.abs() > DIRECT_TOLERANCE {
        return Err(Error::ImaginaryResidue {
            residue: value.im.abs(),
            tolerance: DIRECT_TOLERANCE,
        });
    }
    Ok(value.re)
}

/// Tensor Gauss–Legendre over `Π [-half_i, half_i]`.
fn integrate_box<F>(gl: &GaussLegendre, half: &[f64], panels: usize, f: &F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
{
    let dim = half.len();
    // One-axis composite rule: nodes and weights.
    let axis: Vec<(Vec<f64>, Vec<f64>)> = half
        .iter()
        .map(|&h| {
            let width = 2.0 * h / panels as f64;
            let mut nodes = Vec::with_capacity(panels * gl.order());
            let mut weights = Vec::with_capacity(panels * gl.order());
            for k in 0..panels {
                let mid = -h + (k as f64 + 0.5) * width;
                for (&z, &w) in gl.nodes.iter().zip(&gl.weights) {
                    nodes.push(mid + 0.5 * width * z);
                    weights.push(0.5 * width * w);
                }
            }
            (nodes, weights)
        })
        .collect();
    let per_axis = panels * gl.order();
    let total = per_axis.pow(dim as u32);
    let mut y = vec![0.0; dim];
    let mut acc = Complex64::new(0.0, 0.0);
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for (i, (nodes, weights)) in axis.iter().enumerate() {
            let idx = rem % per_axis;
            rem /= per_axis;
            y[i] = nodes[idx];
            w *= weights[idx];
        }
        acc += f(&y) * w;
    }
    acc
}

/// Fan triangulation of a convex polygon with collapsed-square
/// Gauss–Legendre on each triangle.
fn integrate_polygon<F>(gl: &GaussLegendre, v: &[Point2], panels: usize, f: &F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    let a = v[0];
    for k in 1..v.len() - 1 {
        let b = v[k];
        let c = v[k + 1];
        let ab = [b[0] - a[0], b[1] - a[1]];
        let bc = [c[0] - b[0], c[1] - b[1]];
        let jac = (ab[0] * bc[1] - ab[1] * bc[0]).abs();
        acc += gl.integrate(0.0, 1.0, panels, |u| {
            gl.integrate(0.0, 1.0, panels, |s| {
                let y = [a[0] + u * (ab[0] + s * bc[0]), a[1] + u * (ab[1] + s * bc[1])];
                f(&y) * (u * jac)
            })
        });
    }
    acc
}
