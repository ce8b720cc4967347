//! Run configuration: a TOML file (or a bare preset) plus dotted overrides,
//! validated into the core types in one pass.

use std::fmt;
use std::path::{Path, PathBuf};

use pde_ssc_core::expr::{CatalogExpr, Term};
use pde_ssc_core::lmi::{SearchGrid, DEFAULT_TOLERANCE};
use pde_ssc_core::plant::PlantBounds;
use pde_ssc_core::scenarios::{self, InitialCondition};
use pde_ssc_core::shapes::{BumpForm, BumpWidth, EdgePolicy};
use pde_ssc_core::simulator::DiffusionForm;
use pde_ssc_core::{
    uniform_partition, ActuationPartition, BoundaryCondition, CoefficientField, ControllerSpec, FieldKind, Interval,
    PlantSpec, ShapeSpec, SimulationOptions,
};
use serde::Deserialize;
use thiserror::Error;

/// One failed invariant, addressed by its dotted key path.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("unknown key at line {line}, column {column}: {message}")]
    UnknownKey { line: usize, column: usize, message: String },

    #[error("bad override {0:?}: expected key=value with a dotted key")]
    Override(String),

    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<Issue>),
}

fn list(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl ConfigError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub plant: RawPlant,
    #[serde(default)]
    pub partition: RawPartition,
    #[serde(default)]
    pub shape: RawShape,
    pub controller: Option<RawController>,
    #[serde(default)]
    pub simulation: RawSimulation,
    #[serde(default)]
    pub lmi: RawLmi,
    #[serde(default)]
    pub verify: RawVerify,
    #[serde(default)]
    pub compare: RawCompare,
    #[serde(default)]
    pub output: RawOutput,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPlant {
    pub preset: Option<String>,
    /// Scenario name used in output file names; defaults to the preset name.
    pub name: Option<String>,
    pub order: Option<String>,
    pub length: Option<f64>,
    pub bc: Option<String>,
    pub gamma: Option<f64>,
    pub a1: Option<RawField>,
    pub a2: Option<RawField>,
    pub phi: Option<RawField>,
    pub b: Option<RawField>,
    pub f: Option<RawField>,
}

/// A coefficient given either as a constant or as catalog terms.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawField {
    pub constant: Option<f64>,
    pub terms: Option<Vec<Term>>,
    pub bounds: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPartition {
    pub n: Option<usize>,
    pub breakpoints: Option<Vec<f64>>,
    pub sensors: Option<Vec<f64>>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawShape {
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<BumpWidth>,
    pub form: Option<BumpForm>,
    pub policy: Option<EdgePolicy>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawController {
    pub gain: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimulation {
    pub cells: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub record_every: Option<usize>,
    pub initial: Option<InitialCondition>,
    pub diffusion: Option<DiffusionForm>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLmi {
    pub gain: Option<Vec<f64>>,
    pub young_weight: Option<Vec<f64>>,
    pub decay_rate: Option<Vec<f64>>,
    pub beta_disturbance: Option<Vec<f64>>,
    pub beta_shape: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    /// Spacing to certify; defaults to the partition's.
    pub spacing: Option<f64>,
    /// Bound on sensor readings used for the shape term of `gamma`.
    pub reading_bound: Option<f64>,
    /// Coefficient box to certify; each entry defaults to the plant's bounds.
    pub a1: Option<[f64; 2]>,
    pub a2: Option<[f64; 2]>,
    pub phi: Option<[f64; 2]>,
    pub b: Option<[f64; 2]>,
    pub f_abs_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVerify {
    /// Allowed violation as a fraction of the initial functional value.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCompare {
    /// Shape the configured shape is compared against; defaults to constant.
    pub baseline: Option<RawShape>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub dir: Option<PathBuf>,
    pub prefix: Option<String>,
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    pub plant: PlantSpec,
    pub partition: ActuationPartition,
    pub shape: ShapeSpec,
    pub baseline: ShapeSpec,
    pub controller: Option<ControllerSpec>,
    pub simulation: SimulationOptions,
    pub lmi: LmiConfig,
    pub threshold: f64,
    pub out_dir: PathBuf,
    pub prefix: String,
}

#[derive(Debug, Clone)]
pub struct LmiConfig {
    pub grid: SearchGrid,
    pub tolerance: f64,
    pub spacing: f64,
    pub reading_bound: f64,
    pub bounds: PlantBounds,
}

/// Where a configuration comes from.
#[derive(Debug, Clone, Default)]
pub struct Source {
    pub path: Option<PathBuf>,
    pub preset: Option<String>,
    pub overrides: Vec<String>,
    pub out_dir: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    load(&Source {
        path: Some(path.to_path_buf()),
        ..Default::default()
    })
}

pub fn load(source: &Source) -> Result<RunConfig, ConfigError> {
    let text = match &source.path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
            path: p.clone(),
            source: e,
        })?,
        None => String::new(),
    };
    let mut raw = parse_with_overrides(&text, &source.overrides)?;
    if let Some(p) = &source.preset {
        raw.plant.preset = Some(p.clone());
    }
    if let Some(d) = &source.out_dir {
        raw.output.dir = Some(d.clone());
    }
    validate(raw)
}

pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<RawConfig, ConfigError> {
    if overrides.is_empty() {
        return toml::from_str(text).map_err(|e| de_error(text, e));
    }
    let mut table: toml::Table = toml::from_str(text).map_err(|e| de_error(text, e))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    // Re-render so that errors still carry positions, now in the merged document.
    let merged = toml::to_string(&table).map_err(|e| ConfigError::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    toml::from_str(&merged).map_err(|e| de_error(&merged, e))
}

fn de_error(text: &str, e: toml::de::Error) -> ConfigError {
    let (line, column) = e
        .span()
        .map(|s| line_col(text, s.start))
        .unwrap_or((0, 0));
    let message = e.message().to_string();
    if message.starts_with("unknown field") || message.starts_with("unknown variant") {
        ConfigError::UnknownKey { line, column, message }
    } else {
        ConfigError::Parse { line, column, message }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let bad = || ConfigError::Override(spec.to_string());
    let (key, value) = spec.split_once('=').ok_or_else(bad)?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(bad());
    }
    let value = value.trim();
    // Values are TOML literals; anything that does not parse is a bare string.
    let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let (last, parents) = path.split_last().ok_or_else(bad)?;
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(bad)?;
    }
    cur.insert(last.to_string(), parsed);
    Ok(())
}

struct Issues(Vec<Issue>);

impl Issues {
    fn push(&mut self, key: &str, message: impl Into<String>) {
        self.0.push(Issue {
            key: key.to_string(),
            message: message.into(),
        });
    }

    /// Records the error of a core constructor under `key`.
    fn check<T>(&mut self, key: &str, r: pde_ssc_core::Result<T>) -> Option<T> {
        r.map_err(|e| match e {
            pde_ssc_core::Error::Config(m) => self.push(key, m),
            other => self.push(key, other.to_string()),
        })
        .ok()
    }
}

fn interval(issues: &mut Issues, key: &str, v: [f64; 2]) -> Option<Interval> {
    issues.check(key, Interval::new(v[0], v[1]))
}

fn field(issues: &mut Issues, key: &str, kind: FieldKind, raw: Option<&RawField>) -> Option<CoefficientField> {
    let Some(raw) = raw else {
        issues.push(key, "missing coefficient");
        return None;
    };
    let bounds = match raw.bounds {
        Some(b) => interval(issues, &format!("{key}.bounds"), b)?,
        None => match raw.constant {
            Some(c) => Interval::point(c),
            None => {
                issues.push(&format!("{key}.bounds"), "bounds are required for non-constant coefficients");
                return None;
            }
        },
    };
    match (raw.constant, &raw.terms) {
        (Some(c), None) => issues.check(key, CoefficientField::constant(kind, c, bounds)),
        (None, Some(terms)) => issues.check(key, CoefficientField::catalog(kind, CatalogExpr::new(terms.clone()), bounds)),
        _ => {
            issues.push(key, "give exactly one of `constant` or `terms`");
            None
        }
    }
}

fn plant_section(issues: &mut Issues, raw: &RawPlant) -> Option<(String, PlantSpec)> {
    if let Some(name) = &raw.preset {
        let explicit = [
            ("order", raw.order.is_some()),
            ("length", raw.length.is_some()),
            ("bc", raw.bc.is_some()),
            ("gamma", raw.gamma.is_some()),
            ("a1", raw.a1.is_some()),
            ("a2", raw.a2.is_some()),
            ("phi", raw.phi.is_some()),
            ("b", raw.b.is_some()),
            ("f", raw.f.is_some()),
        ];
        for (k, set) in explicit {
            if set {
                issues.push(&format!("plant.{k}"), "cannot be combined with plant.preset");
            }
        }
        let spec = issues.check("plant.preset", scenarios::preset(name))?;
        return Some((raw.name.clone().unwrap_or_else(|| name.clone()), spec));
    }
    let length = raw.length.unwrap_or(1.0);
    let bc = match (raw.bc.as_deref().unwrap_or("dirichlet"), raw.gamma) {
        ("dirichlet", None) => Some(BoundaryCondition::Dirichlet),
        ("dirichlet", Some(_)) => {
            issues.push("plant.gamma", "only used with bc = \"mixed\"");
            None
        }
        ("mixed", g) => Some(BoundaryCondition::Mixed { gamma: g.unwrap_or(0.0) }),
        (other, _) => {
            issues.push("plant.bc", format!("unknown boundary condition {other:?} (dirichlet, mixed)"));
            None
        }
    };
    let a1 = field(issues, "plant.a1", FieldKind::Diffusion, raw.a1.as_ref());
    let a2 = field(issues, "plant.a2", FieldKind::Convection, raw.a2.as_ref());
    let phi = field(issues, "plant.phi", FieldKind::Reaction, raw.phi.as_ref());
    let f = match &raw.f {
        Some(f) => field(issues, "plant.f", FieldKind::Disturbance, Some(f)),
        None => CoefficientField::constant(FieldKind::Disturbance, 0.0, Interval::point(0.0)).ok(),
    };
    let order = raw.order.as_deref().unwrap_or("parabolic");
    let b = match order {
        "parabolic" => {
            if raw.b.is_some() {
                issues.push("plant.b", "damping only applies to order = \"hyperbolic\"");
            }
            None
        }
        "hyperbolic" => Some(field(issues, "plant.b", FieldKind::Damping, raw.b.as_ref())),
        other => {
            issues.push("plant.order", format!("unknown order {other:?} (parabolic, hyperbolic)"));
            return None;
        }
    };
    let (a1, a2, phi, f, bc) = (a1?, a2?, phi?, f?, bc?);
    let spec = match b {
        None => issues.check("plant", PlantSpec::parabolic(length, a1, a2, phi, f, bc)),
        Some(b) => issues.check("plant", PlantSpec::hyperbolic(length, a1, a2, phi, b?, f, bc)),
    }?;
    Some((raw.name.clone().unwrap_or_else(|| "custom".into()), spec))
}

fn partition_section(issues: &mut Issues, raw: &RawPartition, length: f64) -> Option<ActuationPartition> {
    match (raw.n, &raw.breakpoints, &raw.sensors) {
        (Some(n), None, None) => {
            if raw.delta.is_some() {
                issues.push("partition.delta", "only used with explicit breakpoints");
            }
            issues.check("partition.n", uniform_partition(length, n))
        }
        (None, Some(bp), Some(s)) => {
            if bp.last() != Some(&length) {
                issues.push("partition.breakpoints", format!("last breakpoint must equal the domain length {length}"));
                return None;
            }
            let r = match raw.delta {
                Some(d) => ActuationPartition::with_delta(bp.clone(), s.clone(), d),
                None => ActuationPartition::new(bp.clone(), s.clone()),
            };
            issues.check("partition", r)
        }
        (None, None, None) => issues.check("partition.n", uniform_partition(length, 10)),
        _ => {
            issues.push("partition", "give either `n` or both `breakpoints` and `sensors`");
            None
        }
    }
}

fn shape_section(issues: &mut Issues, key: &str, raw: &RawShape) -> Option<ShapeSpec> {
    let family = raw.family.as_deref().unwrap_or("constant");
    let unused = |issues: &mut Issues, name: &str, set: bool| {
        if set {
            issues.push(&format!("{key}.{name}"), format!("not used by family {family:?}"));
        }
    };
    match family {
        "constant" => {
            unused(issues, "alpha", raw.alpha.is_some());
            unused(issues, "beta", raw.beta.is_some());
            unused(issues, "form", raw.form.is_some());
            unused(issues, "policy", raw.policy.is_some());
            Some(ShapeSpec::Constant)
        }
        "raised-cosine" => {
            unused(issues, "beta", raw.beta.is_some());
            unused(issues, "form", raw.form.is_some());
            let Some(alpha) = raw.alpha else {
                issues.push(&format!("{key}.alpha"), "required for family \"raised-cosine\"");
                return None;
            };
            Some(ShapeSpec::RaisedCosine {
                alpha,
                policy: raw.policy.unwrap_or_default(),
            })
        }
        "bump" => {
            unused(issues, "policy", raw.policy.is_some());
            let alpha = raw.alpha;
            if alpha.is_none() {
                issues.push(&format!("{key}.alpha"), "required for family \"bump\"");
            }
            if raw.beta.is_none() {
                issues.push(&format!("{key}.beta"), "required for family \"bump\"");
            }
            Some(ShapeSpec::Bump {
                alpha: alpha?,
                beta: raw.beta.clone()?,
                form: raw.form.unwrap_or_default(),
            })
        }
        other => {
            issues.push(
                &format!("{key}.family"),
                format!("unknown shape family {other:?} (constant, raised-cosine, bump)"),
            );
            None
        }
    }
}

fn simulation_section(issues: &mut Issues, raw: &RawSimulation) -> SimulationOptions {
    let d = SimulationOptions::default();
    let opts = SimulationOptions {
        cells: raw.cells.unwrap_or(d.cells),
        dt: raw.dt,
        t_end: raw.t_end.unwrap_or(d.t_end),
        record_every: raw.record_every.unwrap_or(d.record_every),
        initial: raw.initial.unwrap_or(d.initial),
        diffusion: raw.diffusion.unwrap_or(d.diffusion),
    };
    if opts.cells < 4 {
        issues.push("simulation.cells", format!("need at least 4 cells, got {}", opts.cells));
    }
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) {
        issues.push("simulation.t_end", format!("must be positive, got {}", opts.t_end));
    }
    if let Some(dt) = opts.dt {
        if !(dt > 0.0 && dt.is_finite()) {
            issues.push("simulation.dt", format!("must be positive, got {dt}"));
        }
    }
    if opts.record_every == 0 {
        issues.push("simulation.record_every", "must be at least 1");
    }
    opts
}

fn lmi_section(issues: &mut Issues, raw: &RawLmi, plant: Option<&PlantSpec>, partition: Option<&ActuationPartition>, gain: Option<f64>) -> Option<LmiConfig> {
    let mut grid = SearchGrid::around_gains(raw.gain.clone().or(gain.map(|k| vec![k])).unwrap_or_else(|| vec![100.0]));
    for (given, slot) in [
        (&raw.young_weight, &mut grid.young_weight),
        (&raw.decay_rate, &mut grid.decay_rate),
        (&raw.beta_disturbance, &mut grid.beta_disturbance),
        (&raw.beta_shape, &mut grid.beta_shape),
        (&raw.p, &mut grid.p),
    ] {
        if let Some(v) = given {
            *slot = v.clone();
        }
    }
    // A gain taken from the controller section is checked there.
    let mut positive = vec![
        ("young_weight", &grid.young_weight),
        ("decay_rate", &grid.decay_rate),
        ("beta_disturbance", &grid.beta_disturbance),
        ("beta_shape", &grid.beta_shape),
    ];
    if raw.gain.is_some() {
        positive.push(("gain", &grid.gain));
    }
    for (name, v) in positive {
        if v.is_empty() {
            issues.push(&format!("lmi.{name}"), "grid must not be empty");
        } else if let Some(bad) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            issues.push(&format!("lmi.{name}"), format!("grid values must be positive, got {bad}"));
        }
    }
    if let Some(bad) = grid.p.iter().find(|p| !(p.abs() < 0.5)) {
        issues.push("lmi.p", format!("cross weights must satisfy |p| < 0.5, got {bad}"));
    }
    let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance >= 0.0) {
        issues.push("lmi.tolerance", format!("must be nonnegative, got {tolerance}"));
    }
    let reading_bound = raw.reading_bound.unwrap_or(1.0);
    if !(reading_bound >= 0.0) {
        issues.push("lmi.reading_bound", format!("must be nonnegative, got {reading_bound}"));
    }
    let spacing = match (raw.spacing, partition) {
        (Some(s), _) if !(s > 0.0) => {
            issues.push("lmi.spacing", format!("must be positive, got {s}"));
            None
        }
        (Some(s), _) => Some(s),
        (None, p) => p.map(|p| p.delta()),
    };
    let mut bounds = plant?.bounds();
    if let Some(v) = raw.a1 {
        bounds.a1 = interval(issues, "lmi.a1", v)?;
    }
    if let Some(v) = raw.a2 {
        bounds.a2 = interval(issues, "lmi.a2", v)?;
    }
    if let Some(v) = raw.phi {
        bounds.phi = interval(issues, "lmi.phi", v)?;
    }
    if let Some(v) = raw.b {
        bounds.b = Some(interval(issues, "lmi.b", v)?);
    }
    if let Some(v) = raw.f_abs_max {
        bounds.f_abs_max = v;
    }
    Some(LmiConfig {
        grid,
        tolerance,
        spacing: spacing?,
        reading_bound,
        bounds,
    })
}

/// Checks every section, collecting all failures before reporting.
pub fn validate(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let mut issues = Issues(Vec::new());
    let plant = plant_section(&mut issues, &raw.plant);
    let length = plant.as_ref().map_or(1.0, |(_, p)| p.length());
    let partition = partition_section(&mut issues, &raw.partition, length);
    let shape = shape_section(&mut issues, "shape", &raw.shape);
    let baseline = match &raw.compare.baseline {
        Some(b) => shape_section(&mut issues, "compare.baseline", b),
        None => Some(ShapeSpec::Constant),
    };
    let controller = match (&raw.controller, &shape, &partition) {
        (Some(c), Some(s), Some(p)) => issues
            .check("controller.gain", ControllerSpec::new(c.gain, s.clone(), p.clone()))
            .map(Some),
        (Some(c), _, _) if !(c.gain > 0.0) => {
            issues.push("controller.gain", format!("controller gain K must satisfy K > 0, got {}", c.gain));
            None
        }
        (Some(_), _, _) => None,
        (None, _, _) => Some(None),
    };
    if let (Some(b), Some(p)) = (&baseline, &partition) {
        issues.check("compare.baseline", b.validate(p));
    }
    let simulation = simulation_section(&mut issues, &raw.simulation);
    let gain = raw.controller.as_ref().map(|c| c.gain);
    let lmi = lmi_section(&mut issues, &raw.lmi, plant.as_ref().map(|(_, p)| p), partition.as_ref(), gain);
    let threshold = raw.verify.threshold.unwrap_or(1e-3);
    if !(threshold >= 0.0) {
        issues.push("verify.threshold", format!("must be nonnegative, got {threshold}"));
    }
    let prefix = raw.output.prefix.unwrap_or_default();
    if prefix.contains(['/', '\\']) {
        issues.push("output.prefix", "must not contain path separators");
    }
    if !issues.0.is_empty() {
        return Err(ConfigError::Invalid(issues.0));
    }
    let (scenario, plant) = plant.expect("no issues");
    Ok(RunConfig {
        scenario,
        plant,
        partition: partition.expect("no issues"),
        shape: shape.expect("no issues"),
        baseline: baseline.expect("no issues"),
        controller: controller.expect("no issues"),
        simulation,
        lmi: lmi.expect("no issues"),
        threshold,
        out_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
        prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        validate(parse_with_overrides(text, &[])?)
    }

    #[test]
    fn preset_alone_is_enough() {
        let c = parse("[plant]\npreset = \"paper-parabolic\"\n").unwrap();
        assert_eq!(c.scenario, "paper-parabolic");
        assert_eq!(c.partition.len(), 10);
        assert!(c.controller.is_none());
        assert_eq!(c.lmi.spacing, 0.1);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("[plant]\npreset = \n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse("[plant]\npreset = \"paper-parabolic\"\ncolour = 1\n") {
            Err(ConfigError::UnknownKey { line, column, .. }) => assert_eq!((line, column), (3, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_problems_are_reported_together() {
        let err = parse(
            "[plant]\npreset = \"nope\"\n[shape]\nfamily = \"bump\"\nalpha = 1.0\n[controller]\ngain = -100.0\n[simulation]\ncells = 2\n",
        )
        .unwrap_err();
        let keys: Vec<&str> = err.issues().iter().map(|i| i.key.as_str()).collect();
        assert!(keys.contains(&"plant.preset"));
        assert!(keys.contains(&"shape.beta"));
        assert!(keys.contains(&"controller.gain"));
        assert!(keys.contains(&"simulation.cells"));
    }

    #[test]
    fn explicit_plant_from_catalog_terms() {
        let text = r#"
[plant]
order = "parabolic"
bc = "mixed"
gamma = 0.5
a1 = { terms = [{ coef = 1.0 }, { coef = 1.0, factors = [{ fn = "sin", x = 1.0 }] }], bounds = [0.5, 2.0] }
a2 = { constant = 0.0 }
phi = { constant = 1.0 }
"#;
        let c = parse(text).unwrap();
        assert_eq!(c.scenario, "custom");
        assert!((c.plant.a1().eval(0.0, 0.5, 0.0) - (1.0 + 0.5f64.sin())).abs() < 1e-15);
        assert_eq!(c.plant.boundary(), BoundaryCondition::Mixed { gamma: 0.5 });
    }

    #[test]
    fn overrides_take_typed_values() {
        let raw = parse_with_overrides(
            "[plant]\npreset = \"paper-parabolic\"\n",
            &["controller.gain=250".into(), "shape.family=raised-cosine".into(), "shape.alpha=100".into()],
        )
        .unwrap();
        let c = validate(raw).unwrap();
        assert_eq!(c.controller.unwrap().gain(), 250.0);
        assert_eq!(c.shape.label(), "raised-cosine");
        assert!(matches!(
            parse_with_overrides("", &["novalue".into()]),
            Err(ConfigError::Override(_))
        ));
    }
}
