//! Run configuration.
//!
//! A run is described by a TOML file with `[model]`, `[forcing]`,
//! `[stepper]`, `[experiment]` and `[output]` sections. The forcing itself
//! lives in a second TOML file referenced by `forcing.file`, resolved
//! relative to the configuration file. Parsing reports every problem it
//! finds, each tagged with the key that caused it.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qg_core::forcing::Forcing;
use qg_core::response::MIN_PERIODS;
use qg_core::{ForcingSpec, ForcingTerm, Grid, ModelParams, Scheme, SpectralField, StepperConfig};
use serde::Serialize;
use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Compare,
    AuxV,
    Stationary,
    Spectrum,
    Decay,
    Bounded,
    Frequencies,
    Attractor,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Simulate,
        Experiment::Compare,
        Experiment::AuxV,
        Experiment::Stationary,
        Experiment::Spectrum,
        Experiment::Decay,
        Experiment::Bounded,
        Experiment::Frequencies,
        Experiment::Attractor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Compare => "compare",
            Experiment::AuxV => "aux-v",
            Experiment::Stationary => "stationary",
            Experiment::Spectrum => "spectrum",
            Experiment::Decay => "decay",
            Experiment::Bounded => "bounded",
            Experiment::Frequencies => "frequencies",
            Experiment::Attractor => "attractor",
        }
    }

    /// Everything except free simulation relies on the spectral gap.
    fn needs_gap(self) -> bool {
        self != Experiment::Simulate
    }

    fn needs_spectrum(self) -> bool {
        matches!(self, Experiment::Spectrum | Experiment::Decay | Experiment::Bounded | Experiment::Frequencies)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

/// One problem found while reading a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    /// Dotted key, e.g. `stepper.dt`, or a section name for cross-key rules.
    pub key: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration:\n{}", render(.0))]
    Invalid(Vec<Issue>),
}

impl ConfigError {
    /// Issues found, empty for read failures.
    pub fn issues(&self) -> &[Issue] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Read { .. } => &[],
        }
    }
}

fn render(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

/// Experiment-specific settings with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    /// Single `ε` for the experiments that take one; defaults to `1/η`.
    pub epsilon: f64,
    /// Strictly decreasing `ε` sweep for compare, aux-v and bounded.
    pub epsilons: Vec<f64>,
    /// Slow-time horizon `T` for simulate and compare.
    pub horizon: f64,
    pub alpha: f64,
    pub truncation: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub perturbation: Vec<(usize, usize, f64)>,
    /// Decay record length in e-foldings of `gap_a`.
    pub efolds: f64,
    /// Record length in slowest forcing periods for bounded and frequencies.
    pub periods: f64,
    pub probe: (usize, usize),
    pub etas: Vec<f64>,
    pub members: usize,
    /// Seed of the random initial state; `None` starts from rest.
    pub seed: Option<u64>,
    pub transient: f64,
    pub span: f64,
    pub samples: usize,
    pub sample_every: usize,
    pub snapshots: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: ModelParams,
    pub spec: ForcingSpec,
    pub stepper: StepperConfig,
    pub settings: Settings,
    pub output_dir: PathBuf,
    pub config_path: PathBuf,
    pub forcing_path: PathBuf,
    /// Parsed source tables, echoed into the manifest.
    pub config_table: Table,
    pub forcing_table: Table,
}

const MODEL_KEYS: &[&str] = &["nu", "r", "beta", "nx", "ny", "lx", "ly"];
const FORCING_KEYS: &[&str] = &["file"];
const STEPPER_KEYS: &[&str] = &["scheme", "dt", "osc_resolution"];
const OUTPUT_KEYS: &[&str] = &["dir"];
const EXPERIMENT_KEYS: &[&str] = &[
    "name",
    "epsilon",
    "epsilons",
    "horizon",
    "alpha",
    "truncation",
    "tol",
    "max_iters",
    "perturbation",
    "efolds",
    "periods",
    "probe",
    "etas",
    "members",
    "seed",
    "transient",
    "span",
    "samples",
    "sample_every",
    "snapshots",
];
const FORCING_FILE_KEYS: &[&str] = &["eta", "mean", "terms"];
const TERM_KEYS: &[&str] = &["modes", "omega", "phase"];

/// Reads and validates `path` for `experiment`. `out` overrides
/// `output.dir`.
pub fn parse_config(path: &Path, experiment: Experiment, out: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base, experiment, out).map(|mut cfg| {
        cfg.config_path = path.to_path_buf();
        cfg
    })
}

/// Like [`parse_config`] with the file contents given; relative paths are
/// resolved against `base`.
pub fn parse_config_str(text: &str, base: &Path, experiment: Experiment, out: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let root: Table = toml::from_str(text).map_err(|e| invalid("config", e.message()))?;
    let mut r = Reader::default();
    r.unknown(&root, "", &["model", "forcing", "stepper", "experiment", "output"]);
    let model = r.section(&root, "model");
    let forcing = r.section(&root, "forcing");
    let stepper = r.section(&root, "stepper");
    let exp = r.section(&root, "experiment");
    let output = r.section(&root, "output");
    r.unknown(&model, "model", MODEL_KEYS);
    r.unknown(&forcing, "forcing", FORCING_KEYS);
    r.unknown(&stepper, "stepper", STEPPER_KEYS);
    r.unknown(&exp, "experiment", EXPERIMENT_KEYS);
    r.unknown(&output, "output", OUTPUT_KEYS);

    if let Some(name) = r.string(&exp, "experiment", "name") {
        if name != experiment.name() {
            r.push("experiment.name", format!("config is for '{name}' but '{experiment}' was requested"));
        }
    }

    let params = read_model(&mut r, &model);

    let mut forcing_path = PathBuf::new();
    let mut forcing_table = Table::new();
    let mut spec = None;
    if let Some(file) = r.required_string(&forcing, "forcing", "file") {
        forcing_path = base.join(&file);
        match std::fs::read_to_string(&forcing_path) {
            Err(e) => r.push("forcing.file", format!("cannot read {}: {e}", forcing_path.display())),
            Ok(ftext) => match toml::from_str::<Table>(&ftext) {
                Err(e) => r.push("forcing.file", format!("{}: {}", forcing_path.display(), e.message())),
                Ok(t) => {
                    if let Some(p) = &params {
                        spec = read_forcing(&mut r, &t, *p.grid());
                    }
                    forcing_table = t;
                }
            },
        }
    }

    let stepper_cfg = read_stepper(&mut r, &stepper, spec.as_ref());
    let settings = read_settings(&mut r, &exp, experiment, params.as_ref(), spec.as_ref());

    let output_dir = match out {
        Some(o) => Some(o.to_path_buf()),
        None => r.string(&output, "output", "dir").map(|d| base.join(d)),
    };
    if output_dir.is_none() && !r.has("output.dir") {
        r.push("output.dir", "missing key (or pass --out)".into());
    }

    if let (Some(p), Some(s)) = (&params, &settings) {
        validate(&mut r, experiment, p, s, spec.as_ref());
    }

    if !r.issues.is_empty() {
        return Err(ConfigError::Invalid(r.issues));
    }
    Ok(RunConfig {
        experiment,
        params: params.expect("validated"),
        spec: spec.expect("validated"),
        stepper: stepper_cfg.expect("validated"),
        settings: settings.expect("validated"),
        output_dir: output_dir.expect("validated"),
        config_path: base.join("<inline>"),
        forcing_path,
        config_table: root,
        forcing_table,
    })
}

fn invalid(key: &str, message: &str) -> ConfigError {
    ConfigError::Invalid(vec![Issue { key: key.into(), message: message.into() }])
}

fn read_model(r: &mut Reader, t: &Table) -> Option<ModelParams> {
    let nu = r.required_f64(t, "model", "nu");
    let rr = r.required_f64(t, "model", "r");
    let beta = r.f64(t, "model", "beta").unwrap_or(0.0);
    let nx = r.required_usize(t, "model", "nx");
    let ny = r.usize(t, "model", "ny").or(nx);
    let lx = r.f64(t, "model", "lx").unwrap_or(PI);
    let ly = r.f64(t, "model", "ly").unwrap_or(PI);
    let grid = match Grid::new(nx?, ny?, lx, ly) {
        Ok(g) => g,
        Err(e) => {
            r.push("model", e.to_string());
            return None;
        }
    };
    match ModelParams::new(nu?, rr?, beta, grid) {
        Ok(p) => Some(p),
        Err(e) => {
            r.push("model", e.to_string());
            None
        }
    }
}

fn read_forcing(r: &mut Reader, t: &Table, grid: Grid) -> Option<ForcingSpec> {
    r.unknown(t, "forcing.file", FORCING_FILE_KEYS);
    let eta = r.f64(t, "forcing.file", "eta").unwrap_or(1.0);
    let mean = r.modes(t, "forcing.file", "mean").unwrap_or_default();
    let mean = r.field(grid, "forcing.file.mean", &mean);
    let mut terms = Vec::new();
    let mut ok = true;
    match t.get("terms") {
        None => {}
        Some(Value::Array(items)) => {
            for (i, item) in items.iter().enumerate() {
                let sec = format!("forcing.file.terms[{i}]");
                let Some(tt) = item.as_table() else {
                    r.push(&sec, "expected a table".into());
                    ok = false;
                    continue;
                };
                r.unknown(tt, &sec, TERM_KEYS);
                let modes = r.modes(tt, &sec, "modes");
                if modes.is_none() && !tt.contains_key("modes") {
                    r.push(&format!("{sec}.modes"), "missing key".into());
                }
                let omega = r.required_f64(tt, &sec, "omega");
                let phase = r.f64(tt, &sec, "phase").unwrap_or(0.0);
                match (modes.and_then(|m| r.field(grid, &format!("{sec}.modes"), &m)), omega) {
                    (Some(amplitude), Some(omega)) => terms.push(ForcingTerm { amplitude, omega, phase }),
                    _ => ok = false,
                }
            }
        }
        Some(_) => {
            r.push("forcing.file.terms", "expected an array of tables".into());
            ok = false;
        }
    }
    let mean = mean?;
    if !ok {
        return None;
    }
    match ForcingSpec::new(mean, terms, eta) {
        Ok(s) => Some(s),
        Err(e) => {
            r.push("forcing.file", e.to_string());
            None
        }
    }
}

/// Default step: [`StepperConfig::DEFAULT_OSC_RESOLUTION`] steps per
/// fastest forcing period in fast time, or per `2π` for steady forcing.
fn read_stepper(r: &mut Reader, t: &Table, spec: Option<&ForcingSpec>) -> Option<StepperConfig> {
    let scheme = match r.string(t, "stepper", "scheme") {
        None => Scheme::default(),
        Some(s) => match s.parse() {
            Ok(s) => s,
            Err(_) => {
                r.push("stepper.scheme", format!("unknown scheme '{s}' (expected etd-rk2 or imex-cn-ab2)"));
                return None;
            }
        },
    };
    let osc = r.usize(t, "stepper", "osc_resolution").unwrap_or(StepperConfig::DEFAULT_OSC_RESOLUTION);
    let period = spec.and_then(|s| s.fastest_period()).unwrap_or(2.0 * PI);
    let dt = match r.f64(t, "stepper", "dt") {
        Some(dt) => dt,
        None if r.has("stepper.dt") => return None,
        None => period / osc as f64,
    };
    let cfg = match StepperConfig::new(dt, scheme, osc) {
        Ok(c) => c,
        Err(e) => {
            r.push("stepper", e.to_string());
            return None;
        }
    };
    if let Some(s) = spec {
        if let Err(e) = cfg.check_resolution(s.fastest_period()) {
            r.push("stepper.dt", e.to_string());
        }
    }
    Some(cfg)
}

fn read_settings(r: &mut Reader, t: &Table, exp: Experiment, params: Option<&ModelParams>, spec: Option<&ForcingSpec>) -> Option<Settings> {
    let sec = "experiment";
    let band = params.map(|p| p.grid().dealias_x().min(p.grid().dealias_y())).unwrap_or(1);
    let before = r.issues.len();
    let settings = Settings {
        epsilon: r.f64(t, sec, "epsilon").unwrap_or_else(|| spec.map(|s| s.epsilon()).unwrap_or(1.0)),
        epsilons: r.f64_list(t, sec, "epsilons").unwrap_or_else(|| {
            if matches!(exp, Experiment::Compare | Experiment::AuxV | Experiment::Bounded) && !r.has("experiment.epsilons") {
                r.push("experiment.epsilons", "missing key".into());
            }
            Vec::new()
        }),
        horizon: r.f64(t, sec, "horizon").unwrap_or(if exp == Experiment::Compare { 2.0 } else { 1.0 }),
        alpha: r.f64(t, sec, "alpha").unwrap_or(0.5),
        truncation: r.usize(t, sec, "truncation").unwrap_or(16.min(band)),
        tol: r.f64(t, sec, "tol").unwrap_or(1e-11),
        max_iters: r.usize(t, sec, "max_iters").unwrap_or(20),
        perturbation: r.modes(t, sec, "perturbation").unwrap_or_else(|| vec![(2, 2, 1e-3)]),
        efolds: r.f64(t, sec, "efolds").unwrap_or(40.0),
        periods: r.f64(t, sec, "periods").unwrap_or(if exp == Experiment::Frequencies { MIN_PERIODS } else { 2.0 }),
        probe: r.pair(t, sec, "probe").unwrap_or((1, 1)),
        etas: r.f64_list(t, sec, "etas").unwrap_or_else(|| vec![4.0, 16.0, 64.0]),
        members: r.usize(t, sec, "members").unwrap_or(8),
        seed: r.u64(t, sec, "seed").or(if exp == Experiment::Attractor { Some(0) } else { None }),
        transient: r.f64(t, sec, "transient").unwrap_or(10.0),
        span: r.f64(t, sec, "span").unwrap_or(1.0),
        samples: r.usize(t, sec, "samples").unwrap_or(16),
        sample_every: r.usize(t, sec, "sample_every").unwrap_or(1),
        snapshots: r.bool(t, sec, "snapshots").unwrap_or(false),
    };
    (r.issues.len() == before).then_some(settings)
}

/// Module preconditions that can be checked before any compute starts.
fn validate(r: &mut Reader, exp: Experiment, p: &ModelParams, s: &Settings, spec: Option<&ForcingSpec>) {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if exp.needs_gap() {
        if let Err(e) = p.require_gap() {
            r.push("model", e.to_string());
        }
    }
    match exp {
        Experiment::Compare | Experiment::AuxV | Experiment::Bounded => {
            if s.epsilons.is_empty() {
                r.push("experiment.epsilons", "must not be empty".into());
            } else if s.epsilons.iter().any(|e| !(positive(*e) && *e <= 1.0)) {
                r.push("experiment.epsilons", "epsilons must lie in (0, 1]".into());
            } else if !qg_core::averaging::strictly_decreasing(&s.epsilons) {
                r.push("experiment.epsilons", "epsilons must be strictly decreasing".into());
            }
        }
        Experiment::Simulate | Experiment::Decay | Experiment::Frequencies if !(positive(s.epsilon) && s.epsilon <= 1.0) => {
            r.push("experiment.epsilon", format!("{} must lie in (0, 1]", s.epsilon));
        }
        _ => {}
    }
    if matches!(exp, Experiment::Simulate | Experiment::Compare) && !positive(s.horizon) {
        r.push("experiment.horizon", "must be positive".into());
    }
    if exp == Experiment::AuxV && !(-1.0..=1.0).contains(&s.alpha) {
        r.push("experiment.alpha", format!("{} outside the supported range [-1, 1]", s.alpha));
    }
    if exp.needs_spectrum() {
        let band = qg_core::spectrum::max_truncation(&qg_core::QgModel::new(*p));
        if s.truncation == 0 || s.truncation > band {
            r.push("experiment.truncation", format!("{} must lie in [1, {band}], the dealiased band", s.truncation));
        }
    }
    if exp != Experiment::Simulate && exp != Experiment::Compare && exp != Experiment::AuxV && exp != Experiment::Attractor {
        if !positive(s.tol) {
            r.push("experiment.tol", "must be positive".into());
        }
        if s.max_iters == 0 {
            r.push("experiment.max_iters", "must be at least 1".into());
        }
    }
    if exp == Experiment::Decay {
        if !positive(s.efolds) {
            r.push("experiment.efolds", "must be positive".into());
        }
        for (k, l, _) in &s.perturbation {
            if p.grid().check_mode(*k, *l).is_err() {
                r.push("experiment.perturbation", format!("mode ({k}, {l}) outside the grid"));
            }
        }
    }
    if matches!(exp, Experiment::Bounded | Experiment::Frequencies) && !positive(s.periods) {
        r.push("experiment.periods", "must be positive".into());
    }
    if exp == Experiment::Frequencies {
        let (k, l) = s.probe;
        if p.grid().check_mode(k, l).is_err() {
            r.push("experiment.probe", format!("mode ({k}, {l}) outside the grid"));
        }
        if spec.is_some_and(|f| !f.is_steady()) && s.periods < MIN_PERIODS {
            r.push("experiment.periods", format!("{} is below the {MIN_PERIODS} periods needed for harmonic analysis", s.periods));
        }
    }
    if exp == Experiment::Attractor {
        if s.etas.is_empty() || s.etas.iter().any(|e| !(e.is_finite() && *e >= 1.0)) {
            r.push("experiment.etas", "eta values must be finite and at least 1".into());
        }
        if s.members == 0 {
            r.push("experiment.members", "must be at least 1".into());
        }
        if s.samples == 0 {
            r.push("experiment.samples", "must be at least 1".into());
        }
        if s.transient.is_nan() || s.transient < 0.0 {
            r.push("experiment.transient", "must be nonnegative".into());
        }
        if !positive(s.span) {
            r.push("experiment.span", "must be positive".into());
        }
    }
    if s.sample_every == 0 {
        r.push("experiment.sample_every", "must be at least 1".into());
    }
}

/// Typed access to TOML tables that records problems instead of stopping
/// at the first one.
#[derive(Default)]
struct Reader {
    issues: Vec<Issue>,
    /// Keys that were present but rejected.
    bad: BTreeSet<String>,
}

fn dotted(sec: &str, key: &str) -> String {
    if sec.is_empty() {
        key.to_string()
    } else {
        format!("{sec}.{key}")
    }
}

impl Reader {
    fn push(&mut self, key: &str, message: String) {
        self.bad.insert(key.to_string());
        self.issues.push(Issue { key: key.to_string(), message });
    }

    fn has(&self, key: &str) -> bool {
        self.bad.contains(key)
    }

    fn section(&mut self, root: &Table, name: &str) -> Table {
        match root.get(name) {
            None => Table::new(),
            Some(Value::Table(t)) => t.clone(),
            Some(_) => {
                self.push(name, "expected a section".into());
                Table::new()
            }
        }
    }

    fn unknown(&mut self, t: &Table, sec: &str, allowed: &[&str]) {
        for key in t.keys() {
            if !allowed.contains(&key.as_str()) {
                self.push(&dotted(sec, key), "unknown key".into());
            }
        }
    }

    fn typed<T>(&mut self, t: &Table, sec: &str, key: &str, what: &str, convert: impl Fn(&Value) -> Option<T>) -> Option<T> {
        let v = t.get(key)?;
        let out = convert(v);
        if out.is_none() {
            self.push(&dotted(sec, key), format!("expected {what}, found {}", v.type_str()));
        }
        out
    }

    fn required<T>(&mut self, value: Option<T>, t: &Table, sec: &str, key: &str) -> Option<T> {
        if value.is_none() && !t.contains_key(key) {
            self.push(&dotted(sec, key), "missing key".into());
        }
        value
    }

    fn f64(&mut self, t: &Table, sec: &str, key: &str) -> Option<f64> {
        self.typed(t, sec, key, "a number", as_f64)
    }

    fn required_f64(&mut self, t: &Table, sec: &str, key: &str) -> Option<f64> {
        let v = self.f64(t, sec, key);
        self.required(v, t, sec, key)
    }

    fn usize(&mut self, t: &Table, sec: &str, key: &str) -> Option<usize> {
        self.typed(t, sec, key, "a nonnegative integer", |v| v.as_integer().and_then(|i| usize::try_from(i).ok()))
    }

    fn required_usize(&mut self, t: &Table, sec: &str, key: &str) -> Option<usize> {
        let v = self.usize(t, sec, key);
        self.required(v, t, sec, key)
    }

    fn u64(&mut self, t: &Table, sec: &str, key: &str) -> Option<u64> {
        self.typed(t, sec, key, "a nonnegative integer", |v| v.as_integer().and_then(|i| u64::try_from(i).ok()))
    }

    fn bool(&mut self, t: &Table, sec: &str, key: &str) -> Option<bool> {
        self.typed(t, sec, key, "a boolean", Value::as_bool)
    }

    fn string(&mut self, t: &Table, sec: &str, key: &str) -> Option<String> {
        self.typed(t, sec, key, "a string", |v| v.as_str().map(str::to_string))
    }

    fn required_string(&mut self, t: &Table, sec: &str, key: &str) -> Option<String> {
        let v = self.string(t, sec, key);
        self.required(v, t, sec, key)
    }

    fn f64_list(&mut self, t: &Table, sec: &str, key: &str) -> Option<Vec<f64>> {
        self.typed(t, sec, key, "an array of numbers", |v| v.as_array()?.iter().map(as_f64).collect())
    }

    fn pair(&mut self, t: &Table, sec: &str, key: &str) -> Option<(usize, usize)> {
        self.typed(t, sec, key, "a [k, l] mode", |v| match v.as_array()?.as_slice() {
            [k, l] => Some((as_index(k)?, as_index(l)?)),
            _ => None,
        })
    }

    /// `[[k, l, amplitude], ...]`.
    fn modes(&mut self, t: &Table, sec: &str, key: &str) -> Option<Vec<(usize, usize, f64)>> {
        self.typed(t, sec, key, "an array of [k, l, amplitude] triples", |v| {
            v.as_array()?
                .iter()
                .map(|m| match m.as_array()?.as_slice() {
                    [k, l, a] => Some((as_index(k)?, as_index(l)?, as_f64(a)?)),
                    _ => None,
                })
                .collect()
        })
    }

    fn field(&mut self, grid: Grid, key: &str, modes: &[(usize, usize, f64)]) -> Option<SpectralField> {
        match SpectralField::from_modes(grid, modes) {
            Ok(f) => Some(f),
            Err(e) => {
                self.push(key, e.to_string());
                None
            }
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn as_index(v: &Value) -> Option<usize> {
    v.as_integer().and_then(|i| usize::try_from(i).ok())
}
