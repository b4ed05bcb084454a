use num_complex::Complex64;

use super::analytic::{g_box, DeltaComb};
use super::grid::{PhaseSpaceGrid, ScalarField, UniformAxis};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::spectral::StateExpansion;

const WINDOW_DECAY: f64 = 1e-3;

/// Free evolution of a callable initial Wigner function: `W₀(x - p t / m, p)`.
pub fn free_wigner<F>(w0: F, x: f64, p: f64, t: f64, mass: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    w0(x - p * t / mass, p)
}

/// A sheared field together with the number of samples whose source point
/// fell outside the stored grid (those are set to zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ShearedField {
    pub field: ScalarField,
    pub out_of_domain: usize,
}

/// Cubic Lagrange interpolation of a uniformly sampled row at `x`.
fn cubic_at(axis: &UniformAxis, row: &[f64], x: f64) -> Option<f64> {
    let n = axis.len();
    let s = (x - axis.start()) / axis.step();
    let tol = 1e-12;
    if s < -tol || s > (n - 1) as f64 + tol {
        return None;
    }
    if n < 4 {
        let i = (s.floor().max(0.0) as usize).min(n - 2);
        let u = s - i as f64;
        return Some(row[i] * (1.0 - u) + row[i + 1] * u);
    }
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64;
    let mut acc = 0.0;
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (u - b as f64) / (a as f64 - b as f64);
            }
        }
        acc += w * row[i + a];
    }
    Some(acc)
}

/// Free evolution of a gridded initial Wigner function by shearing each
/// `p`-row in `x` with cubic interpolation.
pub fn free_wigner_field(w0: &ScalarField, t: f64, mass: f64) -> Result<ShearedField> {
    if !(mass > 0.0) {
        return Err(Error::InvalidState(format!("mass must be positive, got {mass}")));
    }
    let g = w0.grid();
    let (nx, np) = (g.x.len(), g.p.len());
    let mut values = vec![0.0; nx * np];
    let mut out_of_domain = 0;
    for j in 0..np {
        let p = g.p.node(j);
        let row: Vec<f64> = (0..nx).map(|i| w0.get(i, j)).collect();
        for i in 0..nx {
            let xs = g.x.node(i) - p * t / mass;
            match cubic_at(&g.x, &row, xs) {
                Some(v) => values[g.index(i, j)] = v,
                None => out_of_domain += 1,
            }
        }
    }
    Ok(ShearedField {
        field: ScalarField::new(g.clone(), values)?,
        out_of_domain,
    })
}

/// Four-point Lagrange weights that spread `δ(p - q)` over the nodes of
/// `axis`, normalized so that the trapezoid sum of the deposit is one.
fn deposit_weights(axis: &UniformAxis, q: f64) -> Vec<(usize, f64)> {
    let n = axis.len();
    let s = (q - axis.start()) / axis.step();
    if s < 0.0 || s > (n - 1) as f64 || n < 4 {
        return Vec::new();
    }
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64;
    (0..4)
        .map(|a| {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (u - b as f64) / (a as f64 - b as f64);
                }
            }
            (i + a, w / axis.step())
        })
        .collect()
}

/// Freely evolved delta-comb Wigner function of a box state, deposited on
/// a grid: `Σ conj(c_a) c_b λ_ab(x - q t / m) δ(p - q)`.
///
/// Shearing the comb weights reproduces the energy phases of the box
/// eigenmodes exactly, so convolving the result with [`g_box_field`]
/// gives the box Wigner function at time `t`.
pub fn free_wigner_comb_field(state: &StateExpansion, grid: &PhaseSpaceGrid, t: f64, exec: Execution) -> Result<ScalarField> {
    if state.modes()[0].dim() != 1 {
        return Err(Error::Unsupported("comb fields are one-dimensional".into()));
    }
    let np = grid.p.len();
    let m = state.mass();
    let c = state.coeffs();
    let quanta: Vec<u32> = state.modes().iter().map(|m| m.quanta()[0]).collect();
    let combs: Vec<(Complex64, DeltaComb)> = quanta
        .iter()
        .enumerate()
        .flat_map(|(ia, &a)| {
            quanta
                .iter()
                .enumerate()
                .map(move |(ib, &b)| (ia, ib, a, b))
        })
        .map(|(ia, ib, a, b)| (c[ia].conj() * c[ib], DeltaComb::pair(a, b)))
        .collect();
    let rows = exec.map(grid.x.len(), |i| {
        let x = grid.x.node(i);
        let mut row = vec![Complex64::new(0.0, 0.0); np];
        for (weight, comb) in &combs {
            for term in comb.terms() {
                let coeff = weight * term.coeff(x - term.shift * t / m);
                for (j, w) in deposit_weights(&grid.p, term.shift) {
                    row[j] += coeff * w;
                }
            }
        }
        row
    });
    let mut values = Vec::with_capacity(grid.len());
    for row in rows {
        for v in row {
            if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
                return Err(Error::ImaginaryResidue {
                    residue: v.im.abs(),
                    tolerance: 1e-10,
                });
            }
            values.push(v.re);
        }
    }
    ScalarField::new(grid.clone(), values)
}

/// [`g_box`] sampled on the `x` nodes of `x` and a kernel axis centred at
/// `p = 0`; zero outside the box.
pub fn g_box_field(x: &UniformAxis, kernel: &UniformAxis) -> Result<ScalarField> {
    let grid = PhaseSpaceGrid::new(x.clone(), kernel.clone());
    ScalarField::from_fn(grid, |x, p| if x.abs() <= 1.0 { g_box(x, p) } else { 0.0 })
}

/// Discrete convolution in `p` of every `x`-row: `(W₀ *ₚ G)(x, p_j)`.
///
/// `g` must share the `x` nodes of `w0` and have a kernel axis centred on
/// zero with the same spacing. The sum uses trapezoid weights over the
/// `p`-nodes of `w0` and treats `G` as zero beyond its window. A window
/// wide enough to reach every pair of signal nodes is exact; a narrower one
/// is accepted only when `|G|` at its edges is at most `1e-3` of its maximum.
pub fn convolve_p(w0: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    let wg = w0.grid();
    let gg = g.grid();
    if wg.x != gg.x {
        return Err(Error::InvalidGrid("kernel and signal must share x nodes".into()));
    }
    if !wg.p.same_spacing(&gg.p) {
        return Err(Error::InvalidGrid("kernel and signal must share the p spacing".into()));
    }
    let kp = &gg.p;
    let half = match kp.zero_index() {
        Some(k) if 2 * k + 1 == kp.len() => k,
        _ => return Err(Error::InvalidGrid("kernel axis must be centred on p = 0".into())),
    };
    let (nx, np) = (wg.x.len(), wg.p.len());
    if half < np - 1 {
        let max = g.max_abs();
        let edge = (0..nx).fold(0.0f64, |m, i| m.max(g.get(i, 0).abs()).max(g.get(i, kp.len() - 1).abs()));
        if max > 0.0 && edge > WINDOW_DECAY * max {
            return Err(Error::WindowTooSmall { ratio: edge / max });
        }
    }
    let dp = wg.p.step();
    let mut values = vec![0.0; nx * np];
    for i in 0..nx {
        let signal = w0.x_slice(i);
        let kernel = g.x_slice(i);
        for j in 0..np {
            let lo = j.saturating_sub(half);
            let hi = (j + half).min(np - 1);
            let mut acc = 0.0;
            for k in lo..=hi {
                let w = if k == 0 || k == np - 1 { 0.5 } else { 1.0 };
                acc += w * signal[k] * kernel[half + j - k];
            }
            values[wg.index(i, j)] = acc * dp;
        }
    }
    ScalarField::new(wg.clone(), values)
}
