//! Named verification suites.

use std::f64::consts::PI;

use billiard_wigner::current::{continuity_residual, delta_prime_equivalence, eom_rhs};
use billiard_wigner::exec::Execution;
use billiard_wigner::geometry::BilliardShape;
use billiard_wigner::spectral::{momentum_amplitude, StateExpansion, WaveFunction};
use billiard_wigner::wigner::{marginals, wigner_box_analytic, wigner_field, wigner_field_direct, PhaseSpaceGrid};
use billiard_wigner::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Seed of the random probe sets.
pub const PROBE_SEED: u64 = 20_240_917;

/// Points per axis of the marginal integration grid.
pub const MARGINAL_NODES: usize = 512;

/// Momentum spacing of the marginal grid. Ω(x, ·) has extent at most 2 in
/// `y`, so any spacing below π makes the trapezoid sum over `p` alias-free;
/// a wide spacing pushes the slowly decaying `1/p` tails out of the window.
pub const MARGINAL_DP: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail,
        }
    }
}

/// `max |analytic - direct|` over the grid at each time.
pub fn oracle(state: &StateExpansion, grid: &PhaseSpaceGrid, times: &[f64], tol: f64, exec: Execution) -> Result<CheckResult> {
    let shape = BilliardShape::reference_box(1);
    let mut worst: f64 = 0.0;
    for &t in times {
        let a = wigner_field(state, grid, t, exec)?;
        let d = wigner_field_direct(state, &shape, grid, t, exec)?;
        worst = worst.max(a.max_abs_diff(&d));
    }
    Ok(CheckResult::new(
        "oracle",
        worst,
        tol,
        format!("{}x{} grid, {} times", grid.x.len(), grid.p.len(), times.len()),
    ))
}

/// Errors of the two marginals and the total of a gridded Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalErrors {
    /// `max |∫W dp - |φ|²| / max |φ|²`.
    pub position: f64,
    /// `max |∫W dx - |φ̃|²| / max |φ̃|²`.
    pub momentum: f64,
    pub total: f64,
}

/// The integration grid used for marginals: 512 nodes on `[-1, 1]` and 512
/// momentum nodes of spacing [`MARGINAL_DP`] centred on zero.
pub fn marginal_grid() -> PhaseSpaceGrid {
    let half = MARGINAL_DP * (MARGINAL_NODES - 1) as f64 / 2.0;
    PhaseSpaceGrid::linspace((-1.0, 1.0), MARGINAL_NODES, (-half, half), MARGINAL_NODES).unwrap()
}

pub fn marginal_errors(state: &StateExpansion, t: f64, exec: Execution) -> Result<MarginalErrors> {
    let grid = marginal_grid();
    let w = wigner_field(state, &grid, t, exec)?;
    let m = marginals(&w)?;
    let rel = |exact: &[f64], approx: &[f64]| {
        let scale = exact.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        exact.iter().zip(approx).fold(0.0f64, |a, (e, v)| a.max((e - v).abs())) / scale
    };
    let rho: Vec<f64> = grid.x.nodes().iter().map(|&x| state.psi(&[x], t).norm_sqr()).collect();
    let mom = exec.try_map(grid.p.len(), |j| momentum_amplitude(state, grid.p.node(j), t).map(|c| c.norm_sqr()))?;
    Ok(MarginalErrors {
        position: rel(&rho, &m.density_x),
        momentum: rel(&mom, &m.density_p),
        total: m.total,
    })
}

pub fn marginal_check(state: &StateExpansion, times: &[f64], tol: f64, tol_norm: f64, exec: Execution) -> Result<CheckResult> {
    let (mut worst, mut norm) = (0.0f64, 0.0f64);
    for &t in times {
        let e = marginal_errors(state, t, exec)?;
        worst = worst.max(e.position).max(e.momentum);
        norm = norm.max((e.total - 1.0).abs());
    }
    let mut r = CheckResult::new(
        "marginals",
        worst,
        tol,
        format!("relative L∞ of both marginals; |∬W - 1| = {norm:.3e}"),
    );
    r.passed &= norm <= tol_norm;
    Ok(r)
}

/// Continuity residual on the grid interior; relative to `max |∂ₜW|`, or
/// absolute for stationary states.
pub fn continuity(
    state: &StateExpansion,
    grid: &PhaseSpaceGrid,
    times: &[f64],
    tol_relative: f64,
    tol_stationary: f64,
    exec: Execution,
) -> Result<CheckResult> {
    let stationary = state.is_stationary();
    let mut worst: f64 = 0.0;
    for &t in times {
        let r = continuity_residual(state, grid, t, exec)?;
        worst = worst.max(if stationary { r.max_residual } else { r.relative() });
    }
    let (tol, kind) = if stationary {
        (tol_stationary, "absolute, stationary state")
    } else {
        (tol_relative, "relative to max |dW/dt|")
    };
    Ok(CheckResult::new("continuity", worst, tol, format!("{kind}, {}x{} grid", grid.x.len(), grid.p.len())))
}

/// δ′ identity at random probes: 20 in 1D, or 5 on the square at the given
/// resolution.
pub fn deltaprime(state: &StateExpansion, probes: usize, resolution: usize, tol: f64) -> Result<CheckResult> {
    let dim = state.modes()[0].dim();
    let shape = BilliardShape::reference_box(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.999..0.999)).collect();
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0 * PI..4.0 * PI)).collect();
        let t = rng.gen_range(0.0..1.0);
        let d = delta_prime_equivalence(state, &shape, &x, &p, t, resolution)?;
        worst = worst.max(d.difference());
    }
    Ok(CheckResult::new(
        "deltaprime",
        worst,
        tol,
        format!("{probes} probes, {dim}D, resolution {resolution}"),
    ))
}

/// Every mode of the state as an eigenstate: grid fields equal at all
/// times within `1e-12`, and the equation of motion vanishes on a 21×21
/// probe grid.
pub fn stationary(state: &StateExpansion, grid: &PhaseSpaceGrid, times: &[f64], tol: f64, exec: Execution) -> Result<CheckResult> {
    let shape = BilliardShape::reference_box(1);
    let (x_lo, x_hi) = (grid.x.start().max(-0.99), grid.x.end().min(0.99));
    let probe = PhaseSpaceGrid::linspace((x_lo, x_hi), 21, (grid.p.start(), grid.p.end()), 21)?;
    let (mut field_diff, mut eom) = (0.0f64, 0.0f64);
    for mode in state.modes() {
        let eigen = StateExpansion::eigenstate(mode.clone(), state.mass())?;
        let w0 = wigner_field(&eigen, grid, 0.0, exec)?;
        for &t in times {
            field_diff = field_diff.max(wigner_field(&eigen, grid, t, exec)?.max_abs_diff(&w0));
            let r = exec.try_map(probe.len(), |k| {
                let (x, p) = probe.point(k);
                eom_rhs(&eigen, &shape, &[x], &[p], t, 1)
            })?;
            eom = r.iter().fold(eom, |a, v| a.max(v.abs()));
        }
    }
    let mut r = CheckResult::new(
        "stationary",
        eom,
        tol,
        format!("max |eom rhs| over eigenstates; max field change {field_diff:.3e}"),
    );
    r.passed &= field_diff <= 1e-12;
    Ok(r)
}

/// `W_2D = W_1D(x₁, p₁) W_1D(x₂, p₂)` for `a ⊗ b` on `n⁴` probes.
pub fn separability(a: &StateExpansion, b: &StateExpansion, n: usize, p_max: f64, tol: f64, exec: Execution) -> Result<CheckResult> {
    let product = a.tensor(b)?;
    let xs: Vec<f64> = (0..n).map(|i| -0.95 + 1.9 * i as f64 / (n - 1) as f64).collect();
    let ps: Vec<f64> = (0..n).map(|i| -p_max + 2.0 * p_max * i as f64 / (n - 1) as f64).collect();
    let t = 0.3;
    let rows = exec.try_map(n * n, |k| {
        let (x1, p1) = (xs[k / n], ps[k % n]);
        let wa = wigner_box_analytic(a, &[x1], &[p1], t)?;
        let mut worst: f64 = 0.0;
        for &x2 in &xs {
            for &p2 in &ps {
                let wb = wigner_box_analytic(b, &[x2], &[p2], t)?;
                let w2 = wigner_box_analytic(&product, &[x1, x2], &[p1, p2], t)?;
                worst = worst.max((w2 - wa * wb).abs());
            }
        }
        Ok::<_, billiard_wigner::Error>(worst)
    })?;
    let worst = rows.into_iter().fold(0.0, f64::max);
    Ok(CheckResult::new("separability2d", worst, tol, format!("{} probes", n.pow(4))))
}
