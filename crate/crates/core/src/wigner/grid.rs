use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly spaced, strictly increasing nodes `start + k·step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformAxis {
    start: f64,
    step: f64,
    len: usize,
}

impl UniformAxis {
    /// `len` nodes from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 nodes, got {len}")));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidGrid(format!("axis range [{lo}, {hi}] is degenerate")));
        }
        Ok(Self {
            start: lo,
            step: (hi - lo) / (len - 1) as f64,
            len,
        })
    }

    /// Nodes `k·step` for `k = -half..=half`.
    pub fn centered(step: f64, half: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) || half == 0 {
            return Err(Error::InvalidGrid(format!(
                "centered axis needs positive step and half-count, got {step} and {half}"
            )));
        }
        Ok(Self {
            start: -(half as f64) * step,
            step,
            len: 2 * half + 1,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.node(self.len - 1)
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.len {
            // Hit the requested endpoint exactly.
            self.start + self.step * (self.len - 1) as f64
        } else {
            self.start + self.step * k as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.node(k)).collect()
    }

    /// Index of a node lying at `0` when the axis is symmetric.
    pub fn zero_index(&self) -> Option<usize> {
        let k = (-self.start / self.step).round();
        if k < 0.0 || k as usize >= self.len {
            return None;
        }
        let k = k as usize;
        (self.node(k).abs() <= 1e-12 * self.step).then_some(k)
    }

    pub(crate) fn same_spacing(&self, other: &UniformAxis) -> bool {
        (self.step - other.step).abs() <= 1e-12 * self.step
    }
}

/// Tensor-product grid of the one-dimensional phase plane `(x, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x: UniformAxis,
    pub p: UniformAxis,
}

impl PhaseSpaceGrid {
    pub fn new(x: UniformAxis, p: UniformAxis) -> Self {
        Self { x, p }
    }

    pub fn linspace(x_range: (f64, f64), nx: usize, p_range: (f64, f64), np: usize) -> Result<Self> {
        Ok(Self {
            x: UniformAxis::linspace(x_range.0, x_range.1, nx)?,
            p: UniformAxis::linspace(p_range.0, p_range.1, np)?,
        })
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.x.len() * self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major flat index, `x` outer.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.p.len() + j
    }

    /// `(x, p)` of flat index `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        let np = self.p.len();
        (self.x.node(k / np), self.p.node(k % np))
    }
}

/// Real field sampled on a [`PhaseSpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PhaseSpaceGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: PhaseSpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let (x, p) = grid.point(k);
            return Err(Error::InvalidGrid(format!("non-finite field value at x = {x}, p = {p}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: PhaseSpaceGrid, f: F) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let (x, p) = grid.point(k);
                f(x, p)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Values of the `p`-row at `x` index `i`.
    pub fn x_slice(&self, i: usize) -> &[f64] {
        let np = self.grid.p.len();
        &self.values[i * np..(i + 1) * np]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |self - other|`.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Trapezoidal rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Position and momentum marginals of a gridded Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    /// `∫ W dp` at each `x` node.
    pub density_x: Vec<f64>,
    /// `∫ W dx` at each `p` node.
    pub density_p: Vec<f64>,
    /// `∬ W dx dp`.
    pub total: f64,
}

/// Trapezoidal marginals; fails when the grid misses more than `1e-3` of
/// the probability.
pub fn marginals(w: &ScalarField) -> Result<Marginals> {
    let g = w.grid();
    let (nx, np) = (g.x.len(), g.p.len());
    let density_x: Vec<f64> = (0..nx).map(|i| trapezoid(w.x_slice(i), g.p.step())).collect();
    let density_p: Vec<f64> = (0..np)
        .map(|j| {
            let col: Vec<f64> = (0..nx).map(|i| w.get(i, j)).collect();
            trapezoid(&col, g.x.step())
        })
        .collect();
    let total = trapezoid(&density_x, g.x.step());
    if (total - 1.0).abs() > 1e-3 {
        return Err(Error::InsufficientCoverage { total });
    }
    Ok(Marginals {
        density_x,
        density_p,
        total,
    })
}
