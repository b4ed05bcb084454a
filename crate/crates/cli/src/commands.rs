//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use billiard_wigner::contour::zero_contours;
use billiard_wigner::current::current_fields;
use billiard_wigner::exec::Execution;
use billiard_wigner::spectral::StateExpansion;
use billiard_wigner::wigner::{marginals, wigner_field, PhaseSpaceGrid, ScalarField};
use billiard_wigner::Error;
use serde::Serialize;
use serde_json::json;

use crate::checks::{self, CheckResult};
use crate::config::{Purpose, RunConfig};
use crate::error::CliError;
use crate::output::{contour_csv, csv_table, write_atomic};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Files written and warnings raised by an export run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn file_name(prefix: &str, k: usize) -> String {
    format!("{prefix}_t{k:03}.csv")
}

fn state_json(state: &StateExpansion) -> serde_json::Value {
    let modes: Vec<&[u32]> = state.modes().iter().map(|m| m.quanta()).collect();
    let coeffs: Vec<[f64; 2]> = state.coeffs().iter().map(|c| [c.re, c.im]).collect();
    json!({ "modes": modes, "coeffs": coeffs, "energies": state.energies(), "mass": state.mass() })
}

fn grid_json(grid: &PhaseSpaceGrid) -> serde_json::Value {
    json!({
        "x": [grid.x.start(), grid.x.end()],
        "p": [grid.p.start(), grid.p.end()],
        "nx": grid.x.len(),
        "np": grid.p.len(),
    })
}

fn sidecar(command: &str, cfg: &RunConfig, state: &StateExpansion, grid: &PhaseSpaceGrid, out: &RunOutput) -> serde_json::Value {
    let files: Vec<String> = out
        .files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "config": cfg,
        "state": state_json(state),
        "grid": grid_json(grid),
        "times": cfg.times,
        "files": files,
        "tolerances": cfg.tolerances,
        "warnings": out.warnings,
    })
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

fn coverage_warning(w: &ScalarField, t: f64) -> Result<Option<String>, CliError> {
    match marginals(w) {
        Ok(_) => Ok(None),
        Err(Error::InsufficientCoverage { total }) => Ok(Some(format!(
            "t = {t}: grid integral of W is {total:.6}; the p-range misses part of the state"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn field_rows<'a>(grid: &'a PhaseSpaceGrid, cols: &'a [&'a ScalarField]) -> impl Iterator<Item = Vec<f64>> + 'a {
    (0..grid.len()).map(move |k| {
        let (x, p) = grid.point(k);
        let mut row = vec![x, p];
        row.extend(cols.iter().map(|c| c.values()[k]));
        row
    })
}

fn prepare(cfg: &RunConfig, raw: Option<&str>, purpose: Purpose) -> Result<(StateExpansion, PhaseSpaceGrid, Execution), CliError> {
    cfg.validate(purpose, raw)?;
    Ok((cfg.build_state()?, cfg.build_grid()?, cfg.execution.into()))
}

/// One `x,p,W` CSV per time plus `wigner.json`.
pub fn cmd_wigner(cfg: &RunConfig, raw: Option<&str>, out_dir: &Path) -> Result<RunOutput, CliError> {
    let (state, grid, exec) = prepare(cfg, raw, Purpose::Field)?;
    let mut out = RunOutput::default();
    for (k, &t) in cfg.times.iter().enumerate() {
        let w = wigner_field(&state, &grid, t, exec)?;
        out.warnings.extend(coverage_warning(&w, t)?);
        let csv = csv_table(&["x", "p", "W"], field_rows(&grid, &[&w]))?;
        out.files.push(write_atomic(out_dir, &file_name("wigner", k), csv.as_bytes())?);
    }
    let meta = sidecar("wigner", cfg, &state, &grid, &out);
    out.files.push(write_json(out_dir, "wigner.json", &meta)?);
    Ok(out)
}

/// Per time: an `x,p,W,jx,jp` CSV and the `W = 0` contours; plus `current.json`.
pub fn cmd_current(cfg: &RunConfig, raw: Option<&str>, out_dir: &Path) -> Result<RunOutput, CliError> {
    let (state, grid, exec) = prepare(cfg, raw, Purpose::Field)?;
    let mut out = RunOutput::default();
    for (k, &t) in cfg.times.iter().enumerate() {
        let f = current_fields(&state, &grid, t, exec)?;
        out.warnings.extend(coverage_warning(&f.w, t)?);
        let csv = csv_table(&["x", "p", "W", "jx", "jp"], field_rows(&grid, &[&f.w, &f.jx, &f.jp]))?;
        out.files.push(write_atomic(out_dir, &file_name("current", k), csv.as_bytes())?);
        let contours = contour_csv(&zero_contours(&f.w));
        out.files.push(write_atomic(out_dir, &file_name("contours", k), contours.as_bytes())?);
    }
    let meta = sidecar("current", cfg, &state, &grid, &out);
    out.files.push(write_json(out_dir, "current.json", &meta)?);
    Ok(out)
}

/// Outcome of `check`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn table(&self) -> String {
        let mut s = format!("{:<16} {:>6} {:>12} {:>12}  detail\n", "check", "result", "measured", "tolerance");
        for r in &self.results {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            writeln!(s, "{:<16} {:>6} {:>12.3e} {:>12.3e}  {}", r.name, verdict, r.measured, r.tolerance, r.detail).unwrap();
        }
        s
    }
}

pub fn run_check(name: &str, cfg: &RunConfig, state: &StateExpansion, grid: &PhaseSpaceGrid, exec: Execution) -> Result<CheckResult, CliError> {
    let tol = &cfg.tolerances;
    let times = &cfg.times;
    let r = match name {
        "oracle" => checks::oracle(state, grid, times, tol.oracle, exec)?,
        "marginals" => checks::marginal_check(state, times, tol.marginals, tol.normalization, exec)?,
        "continuity" => checks::continuity(state, grid, times, tol.continuity, tol.stationary, exec)?,
        "deltaprime" => {
            if state.modes()[0].dim() == 1 {
                checks::deltaprime(state, 20, 1, tol.deltaprime)?
            } else {
                checks::deltaprime(state, 5, 256, tol.deltaprime_2d)?
            }
        }
        "stationary" => checks::stationary(state, grid, times, tol.stationary, exec)?,
        "separability2d" => {
            let p_max = grid.p.start().abs().max(grid.p.end().abs());
            checks::separability(state, state, 21, p_max, tol.separability, exec)?
        }
        other => unreachable!("check `{other}` passed validation"),
    };
    Ok(r)
}

/// Runs the configured checks and writes `check.json`.
pub fn cmd_check(cfg: &RunConfig, raw: Option<&str>, out_dir: &Path) -> Result<CheckReport, CliError> {
    let (state, grid, exec) = prepare(cfg, raw, Purpose::Check)?;
    let results = cfg
        .checks
        .iter()
        .map(|name| run_check(name, cfg, &state, &grid, exec))
        .collect::<Result<Vec<_>, _>>()?;
    let report = CheckReport { results };
    let meta = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": "check",
        "config": cfg,
        "passed": report.all_passed(),
        "results": report.results,
    });
    write_json(out_dir, "check.json", &meta)?;
    Ok(report)
}

/// Gaussian projection coefficients, one row per mode.
pub fn cmd_project(cfg: &RunConfig, raw: Option<&str>) -> Result<String, CliError> {
    cfg.validate(Purpose::Project, raw)?;
    let state = cfg.build_state()?;
    let mut s = String::from("mode,re,im,abs2,energy\n");
    for ((m, c), e) in state.modes().iter().zip(state.coeffs()).zip(state.energies()) {
        let q: Vec<String> = m.quanta().iter().map(u32::to_string).collect();
        writeln!(s, "{},{:.16e},{:.16e},{:.16e},{:.16e}", q.join(" "), c.re, c.im, c.norm_sqr(), e).unwrap();
    }
    writeln!(s, "# norm {:.16e}", state.norm_sqr()).unwrap();
    Ok(s)
}
