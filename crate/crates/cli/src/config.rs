//! Run configuration: TOML file, command-line overrides and validation.

use std::fmt;
use std::path::Path;

use billiard_wigner::exec::Execution;
use billiard_wigner::geometry::BilliardShape;
use billiard_wigner::spectral::{Mode, StateExpansion};
use billiard_wigner::wigner::PhaseSpaceGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Names accepted in `checks`.
pub const CHECK_NAMES: [&str; 6] = ["oracle", "marginals", "continuity", "deltaprime", "stationary", "separability2d"];

/// Smallest node count per axis for field exports.
pub const MIN_FIELD_NODES: usize = 16;

/// A configuration problem, located by field and, when known, by line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Interval { a: f64, b: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ShapeSpec {
    pub fn build(&self) -> Result<BilliardShape, ConfigError> {
        let shape = match self {
            ShapeSpec::Interval { a, b } => BilliardShape::interval(*a, *b),
            ShapeSpec::Box { lo, hi } => BilliardShape::axis_box(lo.clone(), hi.clone()),
            ShapeSpec::Polygon { vertices } => BilliardShape::polygon(vertices.clone()),
        };
        shape.map_err(|e| ConfigError::new("shape", e.to_string()))
    }
}

/// A mode given as one quantum number (1D) or one per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeSpec {
    Single(u32),
    Multi(Vec<u32>),
}

impl ModeSpec {
    fn quanta(&self) -> Vec<u32> {
        match self {
            ModeSpec::Single(n) => vec![*n],
            ModeSpec::Multi(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Momentum {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    /// Projection of `exp(-x²/a² - i p0 x)` onto the listed modes.
    Gaussian { width: f64, p0: Momentum, modes: Vec<ModeSpec> },
    /// Coefficients `[re, im]` per mode, normalized on load.
    Explicit { modes: Vec<ModeSpec>, coeffs: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub p: [f64; 2],
    pub nx: usize,
    pub np: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub oracle: f64,
    pub marginals: f64,
    pub normalization: f64,
    pub continuity: f64,
    pub stationary: f64,
    pub deltaprime: f64,
    pub deltaprime_2d: f64,
    pub separability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle: 1e-6,
            marginals: 1e-4,
            normalization: 1e-4,
            continuity: 1e-3,
            stationary: 1e-6,
            deltaprime: 1e-8,
            deltaprime_2d: 1e-4,
            separability: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutionSpec {
    Sequential,
    #[default]
    Parallel,
}

impl From<ExecutionSpec> for Execution {
    fn from(e: ExecutionSpec) -> Self {
        match e {
            ExecutionSpec::Sequential => Execution::Sequential,
            ExecutionSpec::Parallel => Execution::Parallel,
        }
    }
}

fn default_mass() -> f64 {
    1.0
}

fn default_times() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub shape: ShapeSpec,
    pub state: StateSpec,
    #[serde(default = "default_mass")]
    pub mass: f64,
    pub grid: GridSpec,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub execution: ExecutionSpec,
}

/// What a validated configuration will be used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Field exports on the one-dimensional phase plane.
    Field,
    Check,
    Project,
}

/// Parses `key=value`, where `value` is a TOML value or a bare string.
pub fn parse_override(spec: &str) -> Result<(String, toml::Value), ConfigError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError::new(spec, "override must have the form key=value"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(|s| s.is_empty()) {
        return Err(ConfigError::new(spec, "override key must be a dotted path"));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((key.to_string(), value))
}

fn apply_override(root: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = key.split('.').collect();
    let mut table = root;
    for (depth, part) in parts[..parts.len() - 1].iter().enumerate() {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| {
            ConfigError::new(parts[..=depth].join("."), "cannot override inside a non-table value")
        })?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Line (1-based) of `key = ...` for a dotted path, scanning table headers.
fn locate(raw: &str, field: &str) -> Option<usize> {
    let (table, key) = match field.rsplit_once('.') {
        Some((t, k)) => (t, k),
        None => ("", field),
    };
    let mut current = String::new();
    let mut header_line = None;
    for (i, line) in raw.lines().enumerate() {
        let l = line.trim();
        if let Some(h) = l.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = h.trim().to_string();
            if current == field {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current == table {
            if let Some((k, _)) = l.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header_line
}

impl RunConfig {
    /// Reads and parses a configuration file, applying overrides.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&raw, overrides)
    }

    pub fn parse(raw: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table: toml::Table = toml::from_str(raw).map_err(|e| toml_error(raw, &e))?;
        let mut overridden = Vec::new();
        for spec in overrides {
            let (key, value) = parse_override(spec)?;
            apply_override(&mut table, &key, value)?;
            overridden.push(key);
        }
        let config: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| {
            let mut err = toml_error(raw, &e);
            if !overridden.is_empty() && err.line.is_none() {
                err.message.push_str(" (after --set overrides)");
            }
            err
        })?;
        Ok(config)
    }

    /// Validates invariants; errors name the field and its line in `raw`.
    pub fn validate(&self, purpose: Purpose, raw: Option<&str>) -> Result<(), ConfigError> {
        self.validate_inner(purpose).map_err(|mut e| {
            if let Some(raw) = raw {
                e.line = locate(raw, &e.field);
            }
            e
        })
    }

    fn validate_inner(&self, purpose: Purpose) -> Result<(), ConfigError> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(ConfigError::new("mass", format!("must be positive and finite, got {}", self.mass)));
        }
        if self.times.is_empty() {
            return Err(ConfigError::new("times", "needs at least one time"));
        }
        if let Some(t) = self.times.iter().find(|t| !t.is_finite()) {
            return Err(ConfigError::new("times", format!("times must be finite, got {t}")));
        }
        for (name, r) in [("grid.x", self.grid.x), ("grid.p", self.grid.p)] {
            if !(r[0].is_finite() && r[1].is_finite()) || r[0] >= r[1] {
                return Err(ConfigError::new(name, format!("range [{}, {}] is degenerate", r[0], r[1])));
            }
        }
        let min = if purpose == Purpose::Field { MIN_FIELD_NODES } else { 2 };
        for (name, n) in [("grid.nx", self.grid.nx), ("grid.np", self.grid.np)] {
            if n < min {
                return Err(ConfigError::new(name, format!("needs at least {min} nodes, got {n}")));
            }
        }
        let shape = self.shape.build()?;
        let state = self.build_state()?;
        for c in &self.checks {
            if !CHECK_NAMES.contains(&c.as_str()) {
                return Err(ConfigError::new(
                    "checks",
                    format!("unknown check `{c}`; expected one of {}", CHECK_NAMES.join(", ")),
                ));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.oracle", t.oracle),
            ("tolerances.marginals", t.marginals),
            ("tolerances.normalization", t.normalization),
            ("tolerances.continuity", t.continuity),
            ("tolerances.stationary", t.stationary),
            ("tolerances.deltaprime", t.deltaprime),
            ("tolerances.deltaprime_2d", t.deltaprime_2d),
            ("tolerances.separability", t.separability),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(name, format!("must be positive, got {v}")));
            }
        }
        if purpose == Purpose::Field || (purpose == Purpose::Check && !self.checks.is_empty()) {
            let dim = state.modes()[0].dim();
            if shape.dim() != dim {
                return Err(ConfigError::new(
                    "shape",
                    format!("shape is {}-dimensional but the state is {dim}-dimensional", shape.dim()),
                ));
            }
            if shape != BilliardShape::reference_box(dim) {
                return Err(ConfigError::new("shape", "box eigenstates need the reference box [-1, 1]^n"));
            }
        }
        if purpose == Purpose::Field && state.modes()[0].dim() != 1 {
            return Err(ConfigError::new("state.modes", "field exports need a one-dimensional state"));
        }
        if purpose == Purpose::Check {
            let dim = state.modes()[0].dim();
            for c in &self.checks {
                let ok = match c.as_str() {
                    "deltaprime" => dim <= 2,
                    _ => dim == 1,
                };
                if !ok {
                    return Err(ConfigError::new("checks", format!("check `{c}` does not support {dim}-dimensional states")));
                }
            }
        }
        Ok(())
    }

    pub fn build_shape(&self) -> Result<BilliardShape, ConfigError> {
        self.shape.build()
    }

    pub fn build_state(&self) -> Result<StateExpansion, ConfigError> {
        let (modes_spec, field) = match &self.state {
            StateSpec::Gaussian { modes, .. } | StateSpec::Explicit { modes, .. } => (modes, "state.modes"),
        };
        if modes_spec.is_empty() {
            return Err(ConfigError::new(field, "needs at least one mode"));
        }
        let modes = modes_spec
            .iter()
            .map(|m| Mode::new(m.quanta()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::new(field, e.to_string()))?;
        let dim = modes[0].dim();
        if modes.iter().any(|m| m.dim() != dim) {
            return Err(ConfigError::new(field, "all modes must have the same number of quantum numbers"));
        }
        match &self.state {
            StateSpec::Gaussian { width, p0, .. } => {
                let p0 = match p0 {
                    Momentum::Scalar(v) => vec![*v; dim],
                    Momentum::Vector(v) => v.clone(),
                };
                if p0.len() != dim {
                    return Err(ConfigError::new("state.p0", format!("needs {dim} components, got {}", p0.len())));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(ConfigError::new("state.width", format!("must be positive, got {width}")));
                }
                StateExpansion::project_gaussian(*width, &p0, modes, self.mass)
                    .map_err(|e| ConfigError::new("state", e.to_string()))
            }
            StateSpec::Explicit { coeffs, .. } => {
                if coeffs.len() != modes.len() {
                    return Err(ConfigError::new(
                        "state.coeffs",
                        format!("expected {} coefficients, got {}", modes.len(), coeffs.len()),
                    ));
                }
                let c = coeffs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                StateExpansion::new(modes, c, self.mass).map_err(|e| ConfigError::new("state.coeffs", e.to_string()))
            }
        }
    }

    pub fn build_grid(&self) -> Result<PhaseSpaceGrid, ConfigError> {
        let g = &self.grid;
        PhaseSpaceGrid::linspace((g.x[0], g.x[1]), g.nx, (g.p[0], g.p[1]), g.np)
            .map_err(|e| ConfigError::new("grid", e.to_string()))
    }
}

fn toml_error(raw: &str, e: &toml::de::Error) -> ConfigError {
    let line = e.span().map(|s| raw[..s.start.min(raw.len())].matches('\n').count() + 1);
    let message = e.message().to_string();
    let field = message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "config".into());
    ConfigError { field, line, message }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE_MODE: &str = r#"
mass = 1.0
times = [0.0, 0.25]

[shape]
kind = "interval"
a = -1.0
b = 1.0

[state]
kind = "gaussian"
width = 1.0
p0 = 5.0
modes = [1, 5, 10]

[grid]
x = [-1.0, 1.0]
p = [-12.566370614359172, 12.566370614359172]
nx = 101
np = 101
"#;

    #[test]
    fn parses_and_validates_three_mode() {
        let c = RunConfig::parse(THREE_MODE, &[]).unwrap();
        c.validate(Purpose::Field, Some(THREE_MODE)).unwrap();
        assert_eq!(c.build_state().unwrap().len(), 3);
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.output.dir, "out");
    }

    #[test]
    fn overrides_replace_scalars_and_create_keys() {
        let c = RunConfig::parse(THREE_MODE, &["grid.nx=33".into(), "output.dir=elsewhere".into(), "mass = 2".into()]).unwrap();
        assert_eq!(c.grid.nx, 33);
        assert_eq!(c.output.dir, "elsewhere");
        assert_eq!(c.mass, 2.0);
        let c = RunConfig::parse(THREE_MODE, &["times=[1.0, 2.0]".into()]).unwrap();
        assert_eq!(c.times, vec![1.0, 2.0]);
        assert!(parse_override("novalue").is_err());
        assert!(parse_override("a..b=1").is_err());
    }

    #[test]
    fn validation_names_field_and_line() {
        let raw = THREE_MODE.replace("nx = 101", "nx = 8");
        let c = RunConfig::parse(&raw, &[]).unwrap();
        let e = c.validate(Purpose::Field, Some(&raw)).unwrap_err();
        assert_eq!(e.field, "grid.nx");
        let line = raw.lines().position(|l| l.starts_with("nx")).unwrap() + 1;
        assert_eq!(e.line, Some(line));
        assert!(e.to_string().contains("grid.nx"));
    }

    #[test]
    fn empty_modes_are_rejected() {
        let raw = THREE_MODE.replace("modes = [1, 5, 10]", "modes = []");
        let c = RunConfig::parse(&raw, &[]).unwrap();
        let e = c.validate(Purpose::Field, Some(&raw)).unwrap_err();
        assert_eq!(e.field, "state.modes");
        assert!(e.line.is_some());
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let raw = THREE_MODE.replace("mass = 1.0", "mass = ");
        let e = RunConfig::parse(&raw, &[]).unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn unknown_fields_and_checks_are_rejected() {
        let raw = THREE_MODE.replace("mass = 1.0", "mass = 1.0\nmas = 3.0");
        assert!(RunConfig::parse(&raw, &[]).is_err());
        let c = RunConfig::parse(THREE_MODE, &["checks=[\"oracle\", \"bogus\"]".into()]).unwrap();
        let e = c.validate(Purpose::Check, None).unwrap_err();
        assert_eq!(e.field, "checks");
    }

    #[test]
    fn explicit_states_and_bad_values() {
        let raw = THREE_MODE.replace(
            "kind = \"gaussian\"\nwidth = 1.0\np0 = 5.0\nmodes = [1, 5, 10]",
            "kind = \"explicit\"\nmodes = [1, 2]\ncoeffs = [[3.0, 0.0], [0.0, 4.0]]",
        );
        let c = RunConfig::parse(&raw, &[]).unwrap();
        let s = c.build_state().unwrap();
        assert!((s.coeffs()[1].im - 0.8).abs() < 1e-15);
        for (key, field) in [("mass=-1", "mass"), ("grid.p=[1.0, 1.0]", "grid.p"), ("times=[]", "times")] {
            let c = RunConfig::parse(&raw, &[key.into()]).unwrap();
            assert_eq!(c.validate(Purpose::Field, None).unwrap_err().field, field);
        }
        let c = RunConfig::parse(&raw, &["shape.b=2.0".into()]).unwrap();
        assert_eq!(c.validate(Purpose::Field, None).unwrap_err().field, "shape");
    }
}
