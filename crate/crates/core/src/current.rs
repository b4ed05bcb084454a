//! Wigner current, the billiard equation of motion and its checks.
//!
//! With `f(x, y, t) = φ*(x - y/2) φ(x + y/2)` and inward normals `n̂` on
//! ω = ∂Ω(x, ·):
//!
//! ```text
//! ∂W/∂t = -(p/m)·∇ₓW + B
//! B     = -(i/m) (2π)^{-n} ∮_ω e^{-ip·y} n̂·∇ₓf dS
//! jₓ    = p W / m
//! j_p,k = -1/((2π)^n m) ∮_ω (e^{-ip·y} / y_k) n̂_k ∂_{x_k} f dS
//! ```
//!
//! so that `Σ_k ∂_{p_k} j_p,k = -B`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{sub, BilliardShape, Point2};
use crate::spectral::{FreeGaussian, StateExpansion, WaveFunction};
use crate::wigner::{wigner_box_analytic, wigner_box_dt, wigner_box_gradient, wigner_direct, PhaseSpaceGrid, ScalarField};

const NODE_ON_AXIS: f64 = 1e-9;
const WALL_OFFSET: f64 = 1e-6;
const SURFACE_REALNESS: f64 = 1e-8;
const BOX_REALNESS: f64 = 1e-10;

fn real_checked(v: Complex64, tolerance: f64) -> Result<f64> {
    if v.im.abs() > tolerance * v.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue {
            residue: v.im.abs(),
            tolerance,
        });
    }
    Ok(v.re)
}

fn check_point(dim: usize, x: &[f64], p: &[f64]) -> Result<()> {
    if x.len() != dim || p.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len().min(p.len()),
        });
    }
    Ok(())
}

/// Current and momentum flux at one phase-space point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSample {
    pub jx: Vec<f64>,
    pub jp: Vec<f64>,
}

/// `jₓ = p W / m`, componentwise.
pub fn current_x(w: f64, p: &[f64], mass: f64) -> Vec<f64> {
    p.iter().map(|pk| pk / mass * w).collect()
}

/// Momentum current of a one-dimensional state in `[-1, 1]` from the two
/// boundary points `y = ∓2(1 - |x|)` of Ω.
///
/// Points within `1e-6` of a wall are moved inward by that offset, where
/// both boundary points merge at `y = 0`.
pub fn current_p_box<S: WaveFunction + ?Sized>(state: &S, x: f64, p: f64, t: f64) -> Result<f64> {
    check_point(state.dim(), &[x], &[p])?;
    if x.abs() > 1.0 {
        return Ok(0.0);
    }
    let x = if 1.0 - x.abs() < WALL_OFFSET {
        x.signum() * (1.0 - WALL_OFFSET)
    } else {
        x
    };
    let h = 2.0 * (1.0 - x.abs());
    let term = |y: f64, sign: f64| -> Complex64 {
        let df = state.grad_x_f(&[x], &[y], t)[0];
        Complex64::from_polar(sign / y, -p * y) * df
    };
    let v = -(term(-h, 1.0) + term(h, -1.0)) / (2.0 * PI * state.mass());
    real_checked(v, BOX_REALNESS)
}

/// Momentum current from the ω contour of a general shape.
///
/// Fails with [`Error::NodeOnAxis`] when a contour node with a nonzero
/// normal component `n̂_k` sits at `|y_k| < 1e-9`.
pub fn current_p_surface<S: WaveFunction + ?Sized>(
    state: &S,
    shape: &BilliardShape,
    x: &[f64],
    p: &[f64],
    t: f64,
    resolution: usize,
) -> Result<Vec<f64>> {
    let dim = shape.dim();
    check_point(dim, x, p)?;
    let contour = shape.omega_contour(x, resolution);
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for node in contour.nodes() {
        let phase: f64 = p.iter().zip(&node.y).map(|(a, b)| a * b).sum();
        let e = Complex64::from_polar(node.weight, -phase);
        let grad = state.grad_x_f(x, &node.y, t);
        for k in 0..dim {
            if node.normal[k] == 0.0 {
                continue;
            }
            let yk = node.y[k];
            if yk.abs() < NODE_ON_AXIS {
                return Err(Error::NodeOnAxis { axis: k, value: yk });
            }
            acc[k] += e * (node.normal[k] / yk) * grad[k];
        }
    }
    let scale = -1.0 / ((2.0 * PI).powi(dim as i32) * state.mass());
    acc.into_iter().map(|v| real_checked(v * scale, SURFACE_REALNESS)).collect()
}

/// Boundary source `B` of the equation of motion.
pub fn boundary_source<S: WaveFunction + ?Sized>(
    state: &S,
    shape: &BilliardShape,
    x: &[f64],
    p: &[f64],
    t: f64,
    resolution: usize,
) -> Result<f64> {
    let dim = shape.dim();
    check_point(dim, x, p)?;
    let contour = shape.omega_contour(x, resolution);
    let integral = contour.surface_integral(|y, n| {
        let phase: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
        let grad = state.grad_x_f(x, y, t);
        let dn: Complex64 = n.iter().zip(&grad).map(|(a, b)| b * *a).sum();
        Complex64::from_polar(1.0, -phase) * dn
    });
    Ok(source_from_integral(integral, dim, state.mass()))
}

fn source_from_integral(integral: Complex64, dim: usize, mass: f64) -> f64 {
    // -(i/m)(2π)^{-n} ∮ ..., real part.
    let v = Complex64::new(0.0, -1.0) * integral / ((2.0 * PI).powi(dim as i32) * mass);
    v.re
}

fn is_reference_box(shape: &BilliardShape) -> bool {
    match shape {
        BilliardShape::Interval(i) => i.a() == -1.0 && i.b() == 1.0,
        BilliardShape::Box(b) => b.lo().iter().all(|&l| l == -1.0) && b.hi().iter().all(|&h| h == 1.0),
        BilliardShape::Polygon(_) => false,
    }
}

/// Right-hand side `-(p/m)·∇ₓW + B` of the equation of motion.
///
/// `∇ₓW` is analytic for the reference box and a central difference of the
/// quadrature oracle otherwise.
pub fn eom_rhs(
    state: &StateExpansion,
    shape: &BilliardShape,
    x: &[f64],
    p: &[f64],
    t: f64,
    resolution: usize,
) -> Result<f64> {
    let dim = shape.dim();
    check_point(dim, x, p)?;
    if !shape.contains(x) {
        return Ok(0.0);
    }
    let grad = if is_reference_box(shape) {
        wigner_box_gradient(state, x, p, t)?
    } else {
        let h = 1e-5 * shape.diameter();
        let mut xp = x.to_vec();
        let mut g = Vec::with_capacity(dim);
        for k in 0..dim {
            xp[k] = x[k] + h;
            let a = wigner_direct(state, shape, &xp, p, t)?;
            xp[k] = x[k] - h;
            let b = wigner_direct(state, shape, &xp, p, t)?;
            xp[k] = x[k];
            g.push((a - b) / (2.0 * h));
        }
        g
    };
    let m = state.mass();
    let drift: f64 = p.iter().zip(&grad).map(|(pk, gk)| pk / m * gk).sum();
    Ok(-drift + boundary_source(state, shape, x, p, t, resolution)?)
}

/// Both sides of the δ′ boundary identity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPrimeCheck {
    /// Boundary term assembled from the two shifted copies `S±` of the
    /// billiard boundary, each masked by the other copy.
    pub lhs: f64,
    /// Boundary source `B` from the ω contour.
    pub rhs: f64,
}

impl DeltaPrimeCheck {
    pub fn difference(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Compares the δ′-potential boundary term with the ω boundary source.
///
/// The δ′ term reduces to integrals of `e^{-ip·y} n̂·∇ₓf` over
/// `S± = {y : x ± y/2 ∈ S}`, restricted to where the opposite point
/// `x ∓ y/2 = 2x - v` stays in the billiard. Supported for one- and
/// two-dimensional shapes; in 2D each boundary edge is split into
/// `resolution` cells and cells cut by the mask are trimmed by bisection.
pub fn delta_prime_equivalence<S: WaveFunction + ?Sized>(
    state: &S,
    shape: &BilliardShape,
    x: &[f64],
    p: &[f64],
    t: f64,
    resolution: usize,
) -> Result<DeltaPrimeCheck> {
    let dim = shape.dim();
    check_point(dim, x, p)?;
    if !shape.contains(x) {
        return Ok(DeltaPrimeCheck { lhs: 0.0, rhs: 0.0 });
    }
    let rhs = boundary_source(state, shape, x, p, t, resolution)?;
    let integrand = |y: &[f64], n: &[f64]| -> Complex64 {
        let phase: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
        let grad = state.grad_x_f(x, y, t);
        let dn: Complex64 = n.iter().zip(&grad).map(|(a, b)| b * *a).sum();
        Complex64::from_polar(1.0, -phase) * dn
    };
    let mask = |v: &[f64]| -> bool {
        let opposite: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| 2.0 * xi - vi).collect();
        shape.contains(&opposite)
    };
    let mut integral = Complex64::new(0.0, 0.0);
    match dim {
        1 => {
            let (a, b) = match shape {
                BilliardShape::Interval(i) => (i.a(), i.b()),
                BilliardShape::Box(bx) => (bx.lo()[0], bx.hi()[0]),
                BilliardShape::Polygon(_) => unreachable!(),
            };
            for (v, n_in) in [(a, 1.0), (b, -1.0)] {
                if !mask(&[v]) {
                    continue;
                }
                for sigma in [1.0, -1.0] {
                    let y = [sigma * 2.0 * (v - x[0])];
                    integral += integrand(&y, &[sigma * n_in]);
                }
            }
        }
        2 => {
            let edges = shape.edges_2d().ok_or_else(|| Error::Unsupported("a two-dimensional shape".into()))?;
            let res = resolution.max(1);
            for (a, b) in edges {
                let d = sub(b, a);
                let len = d[0].hypot(d[1]);
                let n_in = [-d[1] / len, d[0] / len];
                let at = |s: f64| -> Point2 { [a[0] + s * d[0], a[1] + s * d[1]] };
                let inside = |s: f64| mask(&at(s));
                for j in 0..res {
                    let s0 = j as f64 / res as f64;
                    let s1 = (j + 1) as f64 / res as f64;
                    let Some((lo, hi)) = masked_cell(&inside, s0, s1) else {
                        continue;
                    };
                    let v = at(0.5 * (lo + hi));
                    // |dy/ds| = 2 |dv/ds|.
                    let weight = 2.0 * len * (hi - lo);
                    for sigma in [1.0, -1.0] {
                        let y = [sigma * 2.0 * (v[0] - x[0]), sigma * 2.0 * (v[1] - x[1])];
                        integral += integrand(&y, &[sigma * n_in[0], sigma * n_in[1]]) * weight;
                    }
                }
            }
        }
        _ => return Err(Error::Unsupported("one- or two-dimensional shapes".into())),
    }
    let lhs = source_from_integral(integral, dim, state.mass());
    Ok(DeltaPrimeCheck { lhs, rhs })
}

/// Part of the cell `[s0, s1]` where `inside` holds, assuming at most one
/// switch inside the cell.
fn masked_cell<F: Fn(f64) -> bool>(inside: &F, s0: f64, s1: f64) -> Option<(f64, f64)> {
    let (a, b) = (inside(s0), inside(s1));
    match (a, b) {
        (true, true) => Some((s0, s1)),
        (false, false) => {
            let mid = 0.5 * (s0 + s1);
            if inside(mid) {
                let lo = bisect(inside, s0, mid);
                let hi = bisect(inside, s1, mid);
                Some((lo, hi))
            } else {
                None
            }
        }
        (true, false) => Some((s0, bisect(inside, s1, s0))),
        (false, true) => Some((bisect(inside, s0, s1), s1)),
    }
}

/// Switch point between `outside` (mask false) and `inside` (mask true).
fn bisect<F: Fn(f64) -> bool>(mask: &F, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (outside + inside);
        if mask(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (outside + inside)
}

/// Phase-space flow of a one-dimensional model: Wigner function, its
/// time derivative and the momentum current.
pub trait PhaseSpaceFlow: Sync {
    fn mass(&self) -> f64;

    fn wigner(&self, x: f64, p: f64, t: f64) -> Result<f64>;

    fn wigner_dt(&self, x: f64, p: f64, t: f64) -> Result<f64>;

    fn current_p(&self, x: f64, p: f64, t: f64) -> Result<f64>;

    /// Positions in `x` where the flow is only piecewise smooth; difference
    /// stencils do not straddle them.
    fn seams(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// One-dimensional state in the reference box `[-1, 1]`.
impl PhaseSpaceFlow for StateExpansion {
    fn mass(&self) -> f64 {
        StateExpansion::mass(self)
    }

    fn wigner(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        wigner_box_analytic(self, &[x], &[p], t)
    }

    fn wigner_dt(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        wigner_box_dt(self, &[x], &[p], t)
    }

    fn current_p(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        current_p_box(self, x, p, t)
    }

    /// Ω changes branch at the box centre.
    fn seams(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// A free Gaussian packet inside a billiard large enough that the walls
/// are never reached; the momentum current comes from the ω contour.
#[derive(Debug, Clone, PartialEq)]
pub struct FreePacket {
    pub packet: FreeGaussian,
    pub shape: BilliardShape,
}

impl PhaseSpaceFlow for FreePacket {
    fn mass(&self) -> f64 {
        self.packet.mass
    }

    fn wigner(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        Ok(self.packet.wigner(x, p, t))
    }

    fn wigner_dt(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        Ok(self.packet.wigner_dt(x, p, t))
    }

    fn current_p(&self, x: f64, p: f64, t: f64) -> Result<f64> {
        if !self.shape.contains(&[x]) {
            return Ok(0.0);
        }
        Ok(current_p_surface(&self.packet, &self.shape, &[x], &[p], t, 1)?[0])
    }
}

/// `W`, `jₓ` and `j_p` sampled on a phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentFields {
    pub w: ScalarField,
    pub jx: ScalarField,
    pub jp: ScalarField,
}

pub fn current_fields<F: PhaseSpaceFlow + ?Sized>(
    flow: &F,
    grid: &PhaseSpaceGrid,
    t: f64,
    exec: Execution,
) -> Result<CurrentFields> {
    let m = flow.mass();
    let samples = exec.try_map(grid.len(), |k| {
        let (x, p) = grid.point(k);
        Ok::<_, Error>((flow.wigner(x, p, t)?, flow.current_p(x, p, t)?))
    })?;
    let w: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let jx: Vec<f64> = (0..grid.len()).map(|k| current_x(w[k], &[grid.point(k).1], m)[0]).collect();
    let jp: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(CurrentFields {
        w: ScalarField::new(grid.clone(), w)?,
        jx: ScalarField::new(grid.clone(), jx)?,
        jp: ScalarField::new(grid.clone(), jp)?,
    })
}

/// Continuity residual on the interior of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    /// `∂ₜW + ∂ₓjₓ + ∂_p j_p`, zero on the two-node margin.
    pub residual: ScalarField,
    pub max_residual: f64,
    /// `max |∂ₜW|` over the interior.
    pub max_dt: f64,
}

impl ContinuityReport {
    /// `max_residual / max_dt`; infinite for a stationary flow with a
    /// nonzero residual.
    pub fn relative(&self) -> f64 {
        if self.max_dt > 0.0 {
            self.max_residual / self.max_dt
        } else if self.max_residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Fourth-order central first derivative from `u[-2..=2]`.
fn d1_fourth(um2: f64, um1: f64, up1: f64, up2: f64, h: f64) -> f64 {
    (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h)
}

/// Weights of the five-point first derivative at offset `r` for nodes
/// `0..5` of unit spacing.
fn five_point_weights(r: f64) -> [f64; 5] {
    let mut w = [0.0; 5];
    for (k, wk) in w.iter_mut().enumerate() {
        let denom: f64 = (0..5).filter(|&j| j != k).map(|j| k as f64 - j as f64).product();
        let mut num = 0.0;
        for skip in (0..5).filter(|&j| j != k) {
            num += (0..5)
                .filter(|&j| j != k && j != skip)
                .map(|j| r - j as f64)
                .product::<f64>();
        }
        *wk = num / denom;
    }
    w
}

/// First window start `i + s`, `s` in `-2, -1, -3, 0, -4`, whose five
/// nodes stay inside `0..n` and do not straddle a seam.
fn stencil_start(i: usize, n: usize, nodes: impl Fn(usize) -> f64, seams: &[f64], tol: f64) -> usize {
    for s in [-2isize, -1, -3, 0, -4] {
        let a = i as isize + s;
        if a < 0 || a as usize + 4 >= n {
            continue;
        }
        let (lo, hi) = (nodes(a as usize), nodes(a as usize + 4));
        if seams.iter().all(|&c| c <= lo + tol || c >= hi - tol) {
            return a as usize;
        }
    }
    i - 2
}

/// `∂ₜW + ∇·j` with analytic `∂ₜW` and fourth-order central differences
/// of `jₓ` and `j_p`; nodes within two of the grid edge are skipped.
pub fn continuity_residual<F: PhaseSpaceFlow + ?Sized>(
    flow: &F,
    grid: &PhaseSpaceGrid,
    t: f64,
    exec: Execution,
) -> Result<ContinuityReport> {
    let (nx, np) = (grid.x.len(), grid.p.len());
    if nx < 5 || np < 5 {
        return Err(Error::InvalidGrid("continuity residual needs at least 5 nodes per axis".into()));
    }
    let fields = current_fields(flow, grid, t, exec)?;
    let (hx, hp) = (grid.x.step(), grid.p.step());
    let seams = flow.seams();
    let interior = |k: usize| {
        let (i, j) = (k / np, k % np);
        i >= 2 && i + 2 < nx && j >= 2 && j + 2 < np
    };
    let terms = exec.try_map(grid.len(), |k| {
        if !interior(k) {
            return Ok::<_, Error>((0.0, 0.0));
        }
        let (i, j) = (k / np, k % np);
        let (x, p) = grid.point(k);
        let jp = |b: usize| fields.jp.get(i, b);
        let a = stencil_start(i, nx, |k| grid.x.node(k), &seams, 1e-9 * hx);
        let w = five_point_weights((i - a) as f64);
        let djx: f64 = (0..5).map(|k| w[k] * fields.jx.get(a + k, j)).sum::<f64>() / hx;
        let div = djx + d1_fourth(jp(j - 2), jp(j - 1), jp(j + 1), jp(j + 2), hp);
        let dt = flow.wigner_dt(x, p, t)?;
        Ok((dt + div, dt))
    })?;
    let residual: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let max_residual = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let max_dt = terms.iter().fold(0.0f64, |m, t| m.max(t.1.abs()));
    Ok(ContinuityReport {
        residual: ScalarField::new(grid.clone(), residual)?,
        max_residual,
        max_dt,
    })
}
