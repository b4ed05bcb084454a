//! Billiard shapes, the shifted-intersection region Ω(x, ·) and boundary
//! quadrature.
//!
//! For a fixed position `x` the region
//!
//! ```text
//! Ω(x) = { y : x - y/2 ∈ B  and  x + y/2 ∈ B }
//! ```
//!
//! lives in `y`-space. It is the intersection of the two convex sets
//! `2(B - x)` and `2(x - B)`, so it is convex and symmetric under `y -> -y`.
//! Its boundary ω(x) is discretized into a [`BoundaryContour`] of nodes with
//! inward unit normals and arc-length weights.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

/// Closed interval `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidShape(format!(
                "interval requires finite a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Half-width of Ω(x, ·): the region is `|y| <= half`. Negative outside.
    ///
    /// Branches on the side of the center, `x >= center` taking the distance
    /// to the right wall.
    pub fn omega_half_width(&self, x: f64) -> f64 {
        if x >= self.center() {
            2.0 * (self.b - x)
        } else {
            2.0 * (x - self.a)
        }
    }
}

/// Axis-aligned box `Π [lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidShape(format!(
                "box bounds must be non-empty and of equal length, got {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) || l >= h {
                return Err(Error::InvalidShape(format!(
                    "box axis {i} requires finite lo < hi, got {l} and {h}"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The reference box `[-1, 1]^dim`.
    pub fn reference(dim: usize) -> Self {
        Self {
            lo: vec![-1.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Per-axis half widths of Ω(x, ·), which is the box `Π [-h_i, h_i]`.
    pub fn omega_half_widths(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&xi, (&l, &h))| {
                let c = 0.5 * (l + h);
                if xi >= c {
                    2.0 * (h - xi)
                } else {
                    2.0 * (xi - l)
                }
            })
            .collect()
    }

    fn corners_2d(&self) -> Vec<Point2> {
        let (l, h) = (&self.lo, &self.hi);
        vec![[l[0], l[1]], [h[0], l[1]], [h[0], h[1]], [l[0], h[1]]]
    }
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let k = vertices.len();
        if k < 3 {
            return Err(Error::InvalidShape(format!(
                "polygon needs at least 3 vertices, got {k}"
            )));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("polygon vertices must be finite".into()));
        }
        let scale = diameter_of(&vertices);
        for i in 0..k {
            for j in (i + 1)..k {
                if dist(vertices[i], vertices[j]) <= 1e-12 * scale {
                    return Err(Error::InvalidShape(format!(
                        "polygon vertices {i} and {j} coincide"
                    )));
                }
            }
        }
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let c = vertices[(i + 2) % k];
            let turn = cross(sub(b, a), sub(c, b));
            if turn <= 1e-12 * scale * scale {
                return Err(Error::InvalidShape(format!(
                    "polygon is not strictly convex and counter-clockwise at vertex {}",
                    (i + 1) % k
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn contains(&self, p: Point2) -> bool {
        let k = self.vertices.len();
        let scale = diameter_of(&self.vertices);
        (0..k).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % k];
            cross(sub(b, a), sub(p, a)) >= -1e-14 * scale * scale
        })
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }
}

/// Billiard region `B` with boundary `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BilliardShape {
    Interval(Interval),
    Box(AxisBox),
    Polygon(ConvexPolygon),
}

/// Ω(x, ·) in `y`-space, in a form suitable for quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaRegion {
    Empty,
    /// `Π [-half_i, half_i]` (intervals and boxes).
    Box { half: Vec<f64> },
    /// Convex polygon, counter-clockwise.
    Polygon(Vec<Point2>),
}

impl OmegaRegion {
    /// n-dimensional measure of the region.
    pub fn measure(&self) -> f64 {
        match self {
            OmegaRegion::Empty => 0.0,
            OmegaRegion::Box { half } => half.iter().map(|h| 2.0 * h.max(0.0)).product(),
            OmegaRegion::Polygon(v) => polygon_area(v),
        }
    }
}

/// One quadrature node on a boundary surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourNode {
    pub y: Vec<f64>,
    /// Inward unit normal.
    pub normal: Vec<f64>,
    pub weight: f64,
}

/// Quadrature discretization of a closed boundary surface.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundaryContour {
    nodes: Vec<ContourNode>,
}

impl BoundaryContour {
    pub fn new(nodes: Vec<ContourNode>) -> Self {
        Self { nodes }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[ContourNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of weights, the (n-1)-measure of the surface.
    pub fn measure(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// `Σ weight · integrand(y, normal)`.
    pub fn surface_integral<F>(&self, mut integrand: F) -> Complex64
    where
        F: FnMut(&[f64], &[f64]) -> Complex64,
    {
        self.nodes
            .iter()
            .map(|n| integrand(&n.y, &n.normal) * n.weight)
            .sum()
    }

    /// Vector-valued surface integral with `dim` components.
    pub fn surface_integral_vec<F>(&self, dim: usize, mut integrand: F) -> Vec<Complex64>
    where
        F: FnMut(&[f64], &[f64]) -> Vec<Complex64>,
    {
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        for n in &self.nodes {
            let v = integrand(&n.y, &n.normal);
            debug_assert_eq!(v.len(), dim);
            for (a, vi) in acc.iter_mut().zip(v) {
                *a += vi * n.weight;
            }
        }
        acc
    }
}

impl BilliardShape {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Interval::new(a, b).map(Self::Interval)
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        AxisBox::new(lo, hi).map(Self::Box)
    }

    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        ConvexPolygon::new(vertices).map(Self::Polygon)
    }

    /// The reference box `[-1, 1]^dim` (an interval for `dim == 1`).
    pub fn reference_box(dim: usize) -> Self {
        if dim == 1 {
            Self::Interval(Interval { a: -1.0, b: 1.0 })
        } else {
            Self::Box(AxisBox::reference(dim))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval(_) => 1,
            Self::Box(b) => b.dim(),
            Self::Polygon(_) => 2,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Self::Interval(i) => i.b - i.a,
            Self::Box(b) => b
                .lo
                .iter()
                .zip(&b.hi)
                .map(|(l, h)| (h - l) * (h - l))
                .sum::<f64>()
                .sqrt(),
            Self::Polygon(p) => diameter_of(&p.vertices),
        }
    }

    /// True iff `x` lies in the closed region.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            Self::Interval(i) => x[0] >= i.a && x[0] <= i.b,
            Self::Box(b) => x
                .iter()
                .zip(b.lo.iter().zip(&b.hi))
                .all(|(&xi, (&l, &h))| xi >= l && xi <= h),
            Self::Polygon(p) => p.contains([x[0], x[1]]),
        }
    }

    /// Indicator function `B(x)`; boundary points count as inside.
    pub fn indicator(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            1.0
        } else {
            0.0
        }
    }

    /// `Ω(x, y) = B(x - y/2) · B(x + y/2)`.
    pub fn omega_indicator(&self, x: &[f64], y: &[f64]) -> f64 {
        let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - 0.5 * b).collect();
        let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + 0.5 * b).collect();
        self.indicator(&minus) * self.indicator(&plus)
    }

    /// Ω(x, ·) as a quadrature region.
    pub fn omega_region(&self, x: &[f64]) -> OmegaRegion {
        match self {
            Self::Interval(i) => {
                let h = i.omega_half_width(x[0]);
                if h < 0.0 {
                    OmegaRegion::Empty
                } else {
                    OmegaRegion::Box { half: vec![h] }
                }
            }
            Self::Box(b) => {
                let half = b.omega_half_widths(x);
                if half.iter().any(|&h| h < 0.0) {
                    OmegaRegion::Empty
                } else {
                    OmegaRegion::Box { half }
                }
            }
            Self::Polygon(p) => {
                let xp = [x[0], x[1]];
                let forward: Vec<Point2> = p
                    .vertices
                    .iter()
                    .map(|&v| [2.0 * (v[0] - xp[0]), 2.0 * (v[1] - xp[1])])
                    .collect();
                let reflected: Vec<Point2> = p
                    .vertices
                    .iter()
                    .map(|&v| [2.0 * (xp[0] - v[0]), 2.0 * (xp[1] - v[1])])
                    .collect();
                let clipped = clip_convex(&forward, &reflected);
                let scale = diameter_of(&forward);
                let clipped = cleanup_polygon(clipped, 1e-12 * scale);
                if clipped.len() < 3 || polygon_area(&clipped) <= 1e-14 * scale * scale {
                    OmegaRegion::Empty
                } else {
                    OmegaRegion::Polygon(clipped)
                }
            }
        }
    }

    /// Quadrature of ω(x, ·), the boundary of Ω(x, ·), with inward normals.
    ///
    /// In 1D this is the pair `{-h (normal +1), +h (normal -1)}` with unit
    /// weights, coincident at `y = 0` on the walls. In higher dimensions a
    /// region with empty interior yields an empty contour. `resolution` is
    /// the number of midpoint nodes per edge (per axis on box faces).
    pub fn omega_contour(&self, x: &[f64], resolution: usize) -> BoundaryContour {
        let resolution = resolution.max(1);
        match (self, self.omega_region(x)) {
            (_, OmegaRegion::Empty) => BoundaryContour::empty(),
            (_, OmegaRegion::Box { half }) if half.len() == 1 => two_point_contour(-half[0], half[0]),
            (_, OmegaRegion::Box { half }) => {
                if half.iter().any(|&h| h <= 0.0) {
                    return BoundaryContour::empty();
                }
                let lo: Vec<f64> = half.iter().map(|h| -h).collect();
                box_surface(&lo, &half, resolution)
            }
            (_, OmegaRegion::Polygon(v)) => polygon_surface(&v, resolution),
        }
    }

    /// Quadrature of the shape's own boundary `S` with inward normals.
    pub fn boundary_contour(&self, resolution: usize) -> BoundaryContour {
        let resolution = resolution.max(1);
        match self {
            Self::Interval(i) => two_point_contour(i.a, i.b),
            Self::Box(b) if b.dim() == 1 => two_point_contour(b.lo[0], b.hi[0]),
            Self::Box(b) => box_surface(&b.lo, &b.hi, resolution),
            Self::Polygon(p) => polygon_surface(&p.vertices, resolution),
        }
    }

    /// Counter-clockwise boundary edges of a two-dimensional shape.
    pub fn edges_2d(&self) -> Option<Vec<(Point2, Point2)>> {
        let verts = match self {
            Self::Box(b) if b.dim() == 2 => b.corners_2d(),
            Self::Polygon(p) => p.vertices.clone(),
            _ => return None,
        };
        let k = verts.len();
        Some((0..k).map(|i| (verts[i], verts[(i + 1) % k])).collect())
    }

    /// `-∮_S n̂·∇u dS` with a central-difference gradient of step
    /// `1e-6 · diameter`.
    pub fn surface_delta_prime_apply<U>(&self, u: U, resolution: usize) -> f64
    where
        U: Fn(&[f64]) -> f64,
    {
        let h = 1e-6 * self.diameter();
        self.surface_delta_prime_apply_with_gradient(
            |x: &[f64]| {
                let mut xp = x.to_vec();
                (0..x.len())
                    .map(|k| {
                        xp[k] = x[k] + h;
                        let up = u(&xp);
                        xp[k] = x[k] - h;
                        let um = u(&xp);
                        xp[k] = x[k];
                        (up - um) / (2.0 * h)
                    })
                    .collect()
            },
            resolution,
        )
    }

    /// `-∮_S n̂·∇u dS` with an analytic gradient.
    ///
    /// The normal-derivative reading of `∂²I` is used; curvature terms of the
    /// full Laplacian of the indicator are not included for `n > 1`.
    pub fn surface_delta_prime_apply_with_gradient<G>(&self, grad: G, resolution: usize) -> f64
    where
        G: Fn(&[f64]) -> Vec<f64>,
    {
        let contour = self.boundary_contour(resolution);
        -contour
            .nodes()
            .iter()
            .map(|n| {
                let g = grad(&n.y);
                n.weight * n.normal.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum::<f64>()
    }
}

fn two_point_contour(lo: f64, hi: f64) -> BoundaryContour {
    BoundaryContour::new(vec![
        ContourNode {
            y: vec![lo],
            normal: vec![1.0],
            weight: 1.0,
        },
        ContourNode {
            y: vec![hi],
            normal: vec![-1.0],
            weight: 1.0,
        },
    ])
}

/// Midpoint quadrature on the faces of `Π [lo_i, hi_i]`, `n >= 2`.
fn box_surface(lo: &[f64], hi: &[f64], resolution: usize) -> BoundaryContour {
    let dim = lo.len();
    let steps: Vec<f64> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| (h - l) / resolution as f64)
        .collect();
    let face_count = resolution.pow(dim as u32 - 1);
    let mut nodes = Vec::with_capacity(2 * dim * face_count);
    for axis in 0..dim {
        let weight: f64 = (0..dim).filter(|&i| i != axis).map(|i| steps[i]).product();
        for (side, inward) in [(lo[axis], 1.0), (hi[axis], -1.0)] {
            for flat in 0..face_count {
                let mut rem = flat;
                let mut y = vec![0.0; dim];
                for i in (0..dim).filter(|&i| i != axis) {
                    let idx = rem % resolution;
                    rem /= resolution;
                    y[i] = lo[i] + (idx as f64 + 0.5) * steps[i];
                }
                y[axis] = side;
                let mut normal = vec![0.0; dim];
                normal[axis] = inward;
                nodes.push(ContourNode { y, normal, weight });
            }
        }
    }
    BoundaryContour::new(nodes)
}

/// Midpoint quadrature on the edges of a counter-clockwise polygon.
fn polygon_surface(vertices: &[Point2], resolution: usize) -> BoundaryContour {
    let k = vertices.len();
    let mut nodes = Vec::with_capacity(k * resolution);
    for i in 0..k {
        let a = vertices[i];
        let b = vertices[(i + 1) % k];
        let d = sub(b, a);
        let len = norm(d);
        if len == 0.0 {
            continue;
        }
        let normal = vec![-d[1] / len, d[0] / len];
        let w = len / resolution as f64;
        for j in 0..resolution {
            let s = (j as f64 + 0.5) / resolution as f64;
            nodes.push(ContourNode {
                y: vec![a[0] + s * d[0], a[1] + s * d[1]],
                normal: normal.clone(),
                weight: w,
            });
        }
    }
    BoundaryContour::new(nodes)
}

/// Clips `subject` by the convex counter-clockwise polygon `clip`, one
/// half-plane per clip edge.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut output = subject.to_vec();
    let k = clip.len();
    for i in 0..k {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % k];
        let edge = sub(b, a);
        let side = |p: Point2| cross(edge, sub(p, a));
        let input = std::mem::take(&mut output);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    output.push(intersect(prev, cur, sp, sc));
                }
                output.push(cur);
            } else if sp >= 0.0 {
                output.push(intersect(prev, cur, sp, sc));
            }
        }
    }
    output
}

fn intersect(p: Point2, q: Point2, sp: f64, sq: f64) -> Point2 {
    let t = sp / (sp - sq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Drops consecutive near-duplicate vertices.
fn cleanup_polygon(mut v: Vec<Point2>, tol: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(v.len());
    for p in v.drain(..) {
        if out.last().is_none_or(|&q| dist(p, q) > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && dist(out[0], *out.last().unwrap()) <= tol {
        out.pop();
    }
    out
}

pub fn polygon_area(v: &[Point2]) -> f64 {
    let k = v.len();
    if k < 3 {
        return 0.0;
    }
    0.5 * (0..k).map(|i| cross(v[i], v[(i + 1) % k])).sum::<f64>()
}

fn diameter_of(v: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            d = d.max(dist(v[i], v[j]));
        }
    }
    d
}

pub(crate) fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn norm(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

fn dist(a: Point2, b: Point2) -> f64 {
    norm(sub(a, b))
}
