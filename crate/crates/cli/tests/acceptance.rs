//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use billiard_wigner::current::{continuity_residual, current_p_box, current_p_surface, delta_prime_equivalence};
use billiard_wigner::exec::Execution;
use billiard_wigner::geometry::{BilliardShape, OmegaRegion};
use billiard_wigner::spectral::{Mode, StateExpansion};
use billiard_wigner::wigner::{wigner_box_analytic, wigner_field, wigner_field_direct, PhaseSpaceGrid};
use billiard_wigner_cli::checks::{marginal_errors, separability};
use billiard_wigner_cli::output::read_csv;
use billiard_wigner_cli::{cmd_current, RunConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXEC: Execution = Execution::Parallel;
const TIMES: [f64; 3] = [0.0, 0.25, 1.0];

struct Suite {
    failures: usize,
}

impl Suite {
    fn line(&mut self, id: &str, passed: bool, what: &str, measured: String) {
        if !passed {
            self.failures += 1;
        }
        println!("criterion {id:<3} {}  {what}: {measured}", if passed { "PASS" } else { "FAIL" });
    }

    fn info(&self, id: &str, what: &str, measured: String) {
        println!("criterion {id:<3} INFO  {what}: {measured}");
    }
}

fn three_mode_state() -> StateExpansion {
    let modes = [1, 5, 10].iter().map(|&n| Mode::single(n).unwrap()).collect();
    StateExpansion::project_gaussian(1.0, &[5.0], modes, 1.0).unwrap()
}

fn two_mode_state() -> StateExpansion {
    let modes = vec![Mode::single(1).unwrap(), Mode::single(2).unwrap()];
    StateExpansion::new(modes, vec![Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)], 1.0).unwrap()
}

fn ground_state() -> StateExpansion {
    StateExpansion::eigenstate(Mode::single(1).unwrap(), 1.0).unwrap()
}

fn box_grid(n: usize) -> PhaseSpaceGrid {
    PhaseSpaceGrid::linspace((-1.0, 1.0), n, (-4.0 * PI, 4.0 * PI), n).unwrap()
}

/// Sign with both zeros mapped to 0.
fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn oracle(s: &mut Suite) {
    let state = three_mode_state();
    let grid = box_grid(101);
    let shape = BilliardShape::reference_box(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for t in TIMES {
        let a = wigner_field(&state, &grid, t, EXEC).unwrap();
        let d = wigner_field_direct(&state, &shape, &grid, t, EXEC).unwrap();
        worst = worst.max(a.max_abs_diff(&d));
    }
    let secs = start.elapsed().as_secs_f64();
    s.line(
        "1",
        worst <= 1e-6 && secs <= 60.0,
        "analytic vs direct, 101x101, t in {0, 0.25, 1}",
        format!("L∞ = {worst:.3e} (≤ 1e-6), runtime {secs:.1} s (≤ 60 s)"),
    );
}

fn marginals_and_norm(s: &mut Suite) {
    let state = three_mode_state();
    let (mut rel, mut norm) = (0.0f64, 0.0f64);
    for t in TIMES {
        let e = marginal_errors(&state, t, EXEC).unwrap();
        rel = rel.max(e.position).max(e.momentum);
        norm = norm.max((e.total - 1.0).abs());
    }
    s.line("2", rel <= 1e-4, "marginals, 512-point grids", format!("relative L∞ = {rel:.3e} (≤ 1e-4)"));
    s.line("3", norm <= 1e-4, "normalization", format!("max |∬W - 1| = {norm:.3e} (≤ 1e-4)"));
}

fn continuity(s: &mut Suite) {
    let state = three_mode_state();
    let rel = |n: usize| {
        TIMES
            .iter()
            .map(|&t| continuity_residual(&state, &box_grid(n), t, EXEC).unwrap().relative())
            .fold(0.0, f64::max)
    };
    let (r101, r201) = (rel(101), rel(201));
    s.line("4a", r101 <= 1e-3, "continuity residual, 101x101", format!("relative {r101:.3e} (≤ 1e-3)"));
    let ratio = r101 / r201;
    s.line(
        "4b",
        ratio >= 8.0,
        "residual decay on halving the spacing",
        format!("{r101:.3e} -> {r201:.3e}, ratio {ratio:.1} (≥ 8)"),
    );
    let ground = ground_state();
    let abs = |n: usize| continuity_residual(&ground, &box_grid(n), 0.0, EXEC).unwrap().max_residual;
    let a101 = abs(101);
    s.line("4c", a101 <= 1e-6, "stationary residual, 101x101", format!("absolute {a101:.3e} (≤ 1e-6)"));
    let a801 = abs(801);
    s.info("4c", "stationary residual, 801x801", format!("absolute {a801:.3e}"));
}

fn delta_prime(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let state = three_mode_state();
    let line = BilliardShape::reference_box(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (x, p, t) = (rng.gen_range(-0.999..0.999), rng.gen_range(-4.0 * PI..4.0 * PI), rng.gen_range(0.0..1.0));
        worst = worst.max(delta_prime_equivalence(&state, &line, &[x], &[p], t, 1).unwrap().difference());
    }
    s.line("5a", worst <= 1e-8, "δ′ equivalence, 1D, 20 probes", format!("max diff {worst:.3e} (≤ 1e-8)"));

    let a = StateExpansion::project_gaussian(0.5, &[2.0], (1..=4).map(|n| Mode::single(n).unwrap()).collect(), 1.0).unwrap();
    let product = a.tensor(&two_mode_state()).unwrap();
    let square = BilliardShape::reference_box(2);
    let probes: Vec<([f64; 2], [f64; 2])> = (0..5)
        .map(|_| {
            let x = [rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)];
            let p = [rng.gen_range(-2.0 * PI..2.0 * PI), rng.gen_range(-2.0 * PI..2.0 * PI)];
            (x, p)
        })
        .collect();
    let err = |res: usize| {
        probes
            .iter()
            .map(|(x, p)| delta_prime_equivalence(&product, &square, x, p, 0.3, res).unwrap().difference())
            .fold(0.0, f64::max)
    };
    let (e128, e256, e512) = (err(128), err(256), err(512));
    s.line("5b", e256 <= 1e-4, "δ′ equivalence, 2D, 5 probes at 256 nodes/edge", format!("max diff {e256:.3e} (≤ 1e-4)"));
    s.line(
        "5c",
        e128 / e256 >= 2.0 && e256 / e512 >= 2.0,
        "2D quadrature convergence under doubling",
        format!("128: {e128:.3e}, 256: {e256:.3e}, 512: {e512:.3e}"),
    );
}

fn two_path_current(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let state = three_mode_state();
    let line = BilliardShape::reference_box(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x, p, t) = (rng.gen_range(-0.999..0.999), rng.gen_range(-4.0 * PI..4.0 * PI), rng.gen_range(0.0..1.0));
        let a = current_p_box(&state, x, p, t).unwrap();
        let b = current_p_surface(&state, &line, &[x], &[p], t, 1).unwrap()[0];
        worst = worst.max((a - b).abs());
    }
    s.line("6", worst <= 1e-8, "box vs surface momentum current, 100 probes", format!("max diff {worst:.3e} (≤ 1e-8)"));
}

fn sign_law(s: &mut Suite) {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/three_mode_current.toml");
    let cfg = RunConfig::load(path.as_ref(), &[]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_current(&cfg, None, dir.path()).unwrap();
    let state = cfg.build_state().unwrap();
    let grid = cfg.build_grid().unwrap();
    let (hx, hp) = (grid.x.step(), grid.p.step());

    let (mut points, mut point_failures) = (0usize, 0usize);
    let (mut samples, mut skipped, mut sample_failures) = (0usize, 0usize, 0usize);
    for (k, &t) in cfg.times.iter().enumerate() {
        let (_, rows) = read_csv(&fs::read_to_string(dir.path().join(format!("current_t{k:03}.csv"))).unwrap()).unwrap();
        for r in &rows {
            points += 1;
            if sign(r[3]) != sign(r[1] * r[2]) {
                point_failures += 1;
            }
        }
        let (_, contour) = read_csv(&fs::read_to_string(dir.path().join(format!("contours_t{k:03}.csv"))).unwrap()).unwrap();
        for pair in contour.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a[0] != b[0] {
                continue;
            }
            let (dx, dp) = ((b[1] - a[1]) / hx, (b[2] - a[2]) / hp);
            let len = dx.hypot(dp);
            if len == 0.0 {
                continue;
            }
            let (mx, mp) = (0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2]));
            let (nx, np) = (-dp / len * hx, dx / len * hp);
            let (x1, p1, x2, p2) = (mx + nx, mp + np, mx - nx, mp - np);
            if x1.abs() >= 1.0 || x2.abs() >= 1.0 || sign(p1) != sign(p2) {
                skipped += 1;
                continue;
            }
            samples += 1;
            let jx = |x: f64, p: f64| p / cfg.mass * wigner_box_analytic(&state, &[x], &[p], t).unwrap();
            if sign(jx(x1, p1)) * sign(jx(x2, p2)) != -1 {
                sample_failures += 1;
            }
        }
    }
    s.line(
        "7a",
        point_failures == 0,
        "sign(jx) = sign(p W) on every exported point",
        format!("{point_failures} mismatches of {points}"),
    );
    s.line(
        "7b",
        sample_failures == 0 && samples > 0,
        "jx reverses across every zero contour",
        format!("{sample_failures} failures of {samples} segment samples ({skipped} at walls or p = 0 skipped)"),
    );
}

fn separable(s: &mut Suite) {
    let r = separability(&three_mode_state(), &two_mode_state(), 21, 4.0 * PI, 1e-8, EXEC).unwrap();
    s.line("8", r.passed, "2D product-state separability, 21^4 probes", format!("max diff {:.3e} (≤ 1e-8)", r.measured));
}

fn geometry(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let square = BilliardShape::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap();
    let boxed = BilliardShape::reference_box(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let exact: f64 = x.iter().map(|xi: &f64| (4.0 * (1.0 - xi.abs())).max(0.0)).product();
        for shape in [&square, &boxed] {
            worst = worst.max((shape.omega_region(&x).measure() - exact).abs());
        }
    }
    s.line("9a", worst <= 1e-12, "clipped Ω area on the square, 100 points", format!("max diff {worst:.3e} (≤ 1e-12)"));

    let interval = BilliardShape::interval(-0.5, 1.5).unwrap();
    let mut exact = true;
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-0.5..1.5);
        let h = if x >= 0.5 { 2.0 * (1.5 - x) } else { 2.0 * (x + 0.5) };
        let c = interval.omega_contour(&[x], 1);
        let ys: Vec<f64> = c.nodes().iter().map(|n| n.y[0]).collect();
        let normals: Vec<f64> = c.nodes().iter().map(|n| n.normal[0]).collect();
        exact &= ys == [-h, h] && normals == [1.0, -1.0];
        exact &= interval.omega_region(&[x]) == OmegaRegion::Box { half: vec![h] };
    }
    s.line("9b", exact, "1D ω contour branch values", format!("{}", if exact { "exact on 100 points" } else { "mismatch" }));
}

fn main() -> ExitCode {
    let mut s = Suite { failures: 0 };
    oracle(&mut s);
    marginals_and_norm(&mut s);
    continuity(&mut s);
    delta_prime(&mut s);
    two_path_current(&mut s);
    sign_law(&mut s);
    separable(&mut s);
    geometry(&mut s);
    if s.failures == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} failing line(s)", s.failures);
        ExitCode::FAILURE
    }
}
