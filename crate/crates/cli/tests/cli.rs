use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use billiard_wigner::spectral::{momentum_amplitude, WaveFunction};
use billiard_wigner::wigner::trapezoid;
use billiard_wigner_cli::checks::marginal_grid;
use billiard_wigner_cli::output::read_csv;
use billiard_wigner_cli::RunConfig;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_billiard-wigner")).args(args).output().unwrap()
}

fn run_in(dir: &Path, sub: &str, cfg: &str, sets: &[&str]) -> Output {
    let cfg = config(cfg);
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    for s in sets {
        args.extend(["--set", s]);
    }
    run(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn wigner_export_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "wigner", "three_mode.toml", &["grid.nx=32", "grid.np=32", "times=[0.0, 0.5]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["wigner_t000.csv", "wigner_t001.csv", "wigner.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let (header, rows) = read_csv(&fs::read_to_string(dir.path().join("wigner_t000.csv")).unwrap()).unwrap();
    assert_eq!(header, ["x", "p", "W"]);
    assert_eq!(rows.len(), 32 * 32);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("wigner.json")).unwrap()).unwrap();
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["grid"]["nx"], 32);
    assert_eq!(meta["state"]["energies"].as_array().unwrap().len(), 3);
    assert_eq!(meta["files"].as_array().unwrap().len(), 2);
}

#[test]
fn sidecar_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "wigner", "three_mode.toml", &["grid.nx=20", "grid.np=24"]);
    assert_eq!(o.status.code(), Some(0));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("wigner.json")).unwrap()).unwrap();
    let echoed: RunConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    let original = RunConfig::load(&config("three_mode.toml"), &["grid.nx=20".into(), "grid.np=24".into()]).unwrap();
    assert_eq!(echoed, original);
}

#[test]
fn exports_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sets = ["grid.nx=40", "grid.np=40", "times=[0.0, 0.3]"];
    assert_eq!(run_in(a.path(), "current", "three_mode.toml", &sets).status.code(), Some(0));
    assert_eq!(run_in(b.path(), "current", "three_mode.toml", &sets).status.code(), Some(0));
    for name in ["current_t000.csv", "current_t001.csv", "contours_t001.csv", "current.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn sequential_and_parallel_exports_match() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sets = ["grid.nx=30", "grid.np=30"];
    run_in(a.path(), "wigner", "three_mode.toml", &[sets[0], sets[1], "execution=\"sequential\""]);
    run_in(b.path(), "wigner", "three_mode.toml", &[sets[0], sets[1], "execution=\"parallel\""]);
    assert_eq!(
        fs::read(a.path().join("wigner_t000.csv")).unwrap(),
        fs::read(b.path().join("wigner_t000.csv")).unwrap()
    );
}

#[test]
fn single_mode_fields_are_byte_identical_across_times() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "wigner", "ground.toml", &["grid.nx=48", "grid.np=48"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(dir.path().join("wigner_t000.csv")).unwrap(),
        fs::read(dir.path().join("wigner_t001.csv")).unwrap()
    );
}

#[test]
fn exported_marginals_match_the_densities() {
    let dir = tempfile::tempdir().unwrap();
    let g = marginal_grid();
    let sets = [
        "grid.nx=512".to_string(),
        "grid.np=512".to_string(),
        format!("grid.p=[{:?}, {:?}]", g.p.start(), g.p.end()),
    ];
    let sets: Vec<&str> = sets.iter().map(String::as_str).collect();
    let o = run_in(dir.path(), "wigner", "three_mode.toml", &sets);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = read_csv(&fs::read_to_string(dir.path().join("wigner_t000.csv")).unwrap()).unwrap();
    let (nx, np) = (512, 512);
    let (hx, hp) = (rows[np][0] - rows[0][0], rows[1][1] - rows[0][1]);
    let w = |i: usize, j: usize| rows[i * np + j][2];

    let cfg = RunConfig::load(&config("three_mode.toml"), &[]).unwrap();
    let state = cfg.build_state().unwrap();
    let rho_x: Vec<f64> = (0..nx).map(|i| trapezoid(&(0..np).map(|j| w(i, j)).collect::<Vec<_>>(), hp)).collect();
    let exact_x: Vec<f64> = (0..nx).map(|i| state.psi(&[rows[i * np][0]], 0.0).norm_sqr()).collect();
    let rho_p: Vec<f64> = (0..np).map(|j| trapezoid(&(0..nx).map(|i| w(i, j)).collect::<Vec<_>>(), hx)).collect();
    let exact_p: Vec<f64> = (0..np)
        .map(|j| momentum_amplitude(&state, rows[j][1], 0.0).unwrap().norm_sqr())
        .collect();
    let rel = |a: &[f64], b: &[f64]| {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter().zip(b).fold(0.0f64, |m, (u, v)| m.max((u - v).abs())) / scale
    };
    assert!(rel(&rho_x, &exact_x) <= 1e-4, "{}", rel(&rho_x, &exact_x));
    assert!(rel(&rho_p, &exact_p) <= 1e-4, "{}", rel(&rho_p, &exact_p));
    assert!((trapezoid(&rho_x, hx) - 1.0).abs() <= 1e-4);
}

#[test]
fn ground_state_contours_are_symmetric_in_p() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "current", "ground.toml", &["grid.nx=81", "grid.np=81", "times=[0.0]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&fs::read_to_string(dir.path().join("contours_t000.csv")).unwrap()).unwrap();
    assert_eq!(header, ["segment", "x", "p"]);
    assert!(!rows.is_empty());
    let hp = 8.0 * std::f64::consts::PI / 80.0;
    for r in &rows {
        let mirrored = rows.iter().any(|q| (q[1] - r[1]).abs() < 1e-9 && (q[2] + r[2]).abs() < 1e-3 * hp);
        assert!(mirrored, "no mirror for ({}, {})", r[1], r[2]);
    }
}

#[test]
fn current_export_is_finite_on_the_seam() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "current", "three_mode.toml", &["grid.nx=41", "grid.np=41"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = read_csv(&fs::read_to_string(dir.path().join("current_t000.csv")).unwrap()).unwrap();
    assert_eq!(header, ["x", "p", "W", "jx", "jp"]);
    let seam: Vec<_> = rows.iter().filter(|r| r[0] == 0.0).collect();
    assert_eq!(seam.len(), 41);
    assert!(rows.iter().all(|r| r.iter().all(|v| v.is_finite())));
}

#[test]
fn empty_modes_fail_with_config_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "wigner", "three_mode.toml", &["state.modes=[]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("state.modes"), "{}", stderr(&o));
    assert!(!dir.path().join("wigner.json").exists());
}

#[test]
fn small_grids_report_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let raw = fs::read_to_string(config("three_mode.toml")).unwrap().replace("nx = 101", "nx = 10");
    let path = dir.path().join("bad.toml");
    fs::write(&path, &raw).unwrap();
    let o = run(&["wigner", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let line = raw.lines().position(|l| l.starts_with("nx")).unwrap() + 1;
    assert!(stderr(&o).contains(&format!("line {line}, field `grid.nx`")), "{}", stderr(&o));
}

#[test]
fn unknown_check_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "check", "ground.toml", &["checks=[\"oracle\", \"bogus\"]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn missing_config_is_a_config_error() {
    let o = run(&["wigner", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn passing_checks_exit_zero_and_write_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "check", "three_mode.toml", &["checks=[\"oracle\", \"deltaprime\", \"separability2d\"]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(table.matches("PASS").count(), 3, "{table}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("check.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["results"].as_array().unwrap().len(), 3);
}

#[test]
fn stationary_continuity_passes_on_a_fine_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "check", "ground.toml", &["checks=[\"continuity\", \"stationary\"]", "grid.nx=801", "grid.np=801"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn failing_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "check", "ground.toml", &["checks=[\"continuity\"]", "grid.nx=41", "grid.np=41"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("check.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn two_dimensional_deltaprime_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "check", "square2d.toml", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn field_runs_reject_two_dimensional_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "wigner", "square2d.toml", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn project_prints_normalized_coefficients() {
    let cfg = config("three_mode.toml");
    let o = run(&["project", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    let norm: f64 = rows.iter().map(|r| r.split(',').nth(3).unwrap().parse::<f64>().unwrap()).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn out_flag_overrides_the_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested");
    let cfg = config("ground.toml");
    let o = run(&[
        "wigner", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap(),
        "--set", "grid.nx=16", "--set", "grid.np=16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(target.join("wigner.json").exists());
}
