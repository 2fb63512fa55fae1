//! Experiment dispatch, artifact output and the run manifest.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{debug, info};
use qg_core::attractor::{attractor_distance, averaged_self_distance, AttractorConfig, SampleWindow, INITIAL_RADIUS};
use qg_core::averaging::{compare_finite_interval, epsilon_v_decay, nonincreasing_within, strictly_decreasing, ComparisonConfig};
use qg_core::response::analyze_response;
use qg_core::spectrum::{assemble_l, corollary_smallness, spectrum, SpectrumReport};
use qg_core::stability::{decay_experiment, track_bounded_solution, TrackingConfig};
use qg_core::stationary::{solve_stationary, StationaryState};
use qg_core::stepper::integrate;
use qg_core::{Executor, QgModel, SpectralField};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{ConfigError, Experiment, RunConfig};
use crate::output::{write_atomic, Cell, CsvTable};
use crate::snapshot::write_snapshot;

pub const MANIFEST_NAME: &str = "manifest.json";
/// Ripple allowed in the finite-interval comparison sequence.
pub const COMPARE_RIPPLE: f64 = 0.10;
/// Ripple allowed in the attractor distance sequence.
pub const ATTRACTOR_RIPPLE: f64 = 0.15;
/// Distances at or below this count as converged in monotonicity checks.
pub const NOISE_FLOOR: f64 = 1e-9;
/// Bound on the averaged system's distance to itself.
pub const SELF_DISTANCE_BOUND: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub name: String,
    pub held: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub version: String,
    pub config: Value,
    pub wall_clock_seconds: f64,
    pub summary: Map<String, Value>,
    pub contracts: Vec<Contract>,
    /// Emitted artifacts, relative to the run directory.
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn contracts_held(&self) -> bool {
        self.contracts.iter().all(|c| c.held)
    }

    /// 0 when every contract held, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.contracts_held() {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{experiment}: {stage}: {source}")]
    Compute {
        experiment: Experiment,
        stage: &'static str,
        #[source]
        source: qg_core::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

struct Run<'a> {
    cfg: &'a RunConfig,
    model: QgModel,
    dir: PathBuf,
    files: Vec<String>,
    summary: Map<String, Value>,
    contracts: Vec<Contract>,
}

impl<'a> Run<'a> {
    fn fail(&self, stage: &'static str) -> impl Fn(qg_core::Error) -> RunError + '_ {
        move |source| RunError::Compute { experiment: self.cfg.experiment, stage, source }
    }

    fn path(&mut self, name: &str) -> Result<PathBuf, RunError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| RunError::Io { path: parent.to_path_buf(), source })?;
        }
        self.files.push(name.to_string());
        Ok(path)
    }

    fn csv(&mut self, name: &str, table: &CsvTable) -> Result<(), RunError> {
        let path = self.path(name)?;
        table.write(&path).map_err(|source| RunError::Io { path, source })
    }

    fn snapshot(&mut self, name: &str, field: &SpectralField) -> Result<(), RunError> {
        let path = self.path(name)?;
        write_snapshot(&path, field).map_err(|source| RunError::Io { path, source })
    }

    fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    fn contract(&mut self, name: &str, held: bool, detail: String) {
        if held {
            info!("contract held: {name}");
        } else {
            log::warn!("contract violated: {name} ({detail})");
        }
        self.contracts.push(Contract { name: name.to_string(), held, detail });
    }

    fn initial_state(&self) -> SpectralField {
        let grid = *self.model.grid();
        match self.cfg.settings.seed {
            Some(seed) => qg_core::random::initial_state(grid, seed, INITIAL_RADIUS),
            None => SpectralField::zeros(grid),
        }
    }

    /// Slowest forcing period in fast time, `2π` for steady forcing.
    fn period(&self) -> f64 {
        self.cfg.spec.slowest_period().unwrap_or(2.0 * PI)
    }

    fn stationary(&mut self) -> Result<StationaryState, RunError> {
        let s = &self.cfg.settings;
        let state = solve_stationary(&self.model, self.cfg.spec.mean(), None, s.tol, s.max_iters).map_err(self.fail("stationary state"))?;
        info!("stationary state: residual {:e} after {} Newton steps", state.residual_norm, state.newton_iters);
        self.note("residual_norm", json!(state.residual_norm));
        self.note("newton_iters", json!(state.newton_iters));
        self.note("omega0_l2", json!(state.omega0.norm()));
        self.note("omega0_half", json!(state.omega0.gradient_norm()));
        self.snapshot("omega0.qgf", &state.omega0)?;
        Ok(state)
    }

    fn spectrum(&mut self, omega0: &SpectralField) -> Result<SpectrumReport, RunError> {
        let t = self.cfg.settings.truncation;
        let mat = assemble_l(&self.model, omega0, t).map_err(self.fail("linearization"))?;
        let report = spectrum(&mat, t).map_err(self.fail("spectrum"))?;
        info!("spectrum at truncation {t}: N = {}, gap_a = {:e}", report.n_unstable, report.gap_a);
        self.note("truncation", json!(t));
        self.note("n_unstable", json!(report.n_unstable));
        self.note("gap_a", json!(report.gap_a));
        if let Some(l) = report.slowest() {
            self.note("slowest_eigenvalue", json!([l.re, l.im]));
        }
        Ok(report)
    }
}

/// Runs `cfg` and writes its artifacts and, last, its manifest into
/// `cfg.output_dir`.
pub fn run<E: Executor>(cfg: &RunConfig, exec: &E) -> Result<RunManifest, RunError> {
    let start = Instant::now();
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|source| RunError::Io { path: dir.clone(), source })?;
    // a stale manifest would mark a half-rewritten directory as complete
    let manifest_path = dir.join(MANIFEST_NAME);
    if manifest_path.exists() {
        fs::remove_file(&manifest_path).map_err(|source| RunError::Io { path: manifest_path.clone(), source })?;
    }
    let mut run = Run { cfg, model: QgModel::new(cfg.params), dir, files: Vec::new(), summary: Map::new(), contracts: Vec::new() };
    info!("running {} into {}", cfg.experiment, run.dir.display());
    match cfg.experiment {
        Experiment::Simulate => simulate(&mut run)?,
        Experiment::Compare => compare(&mut run, exec)?,
        Experiment::AuxV => aux_v(&mut run, exec)?,
        Experiment::Stationary => stationary(&mut run)?,
        Experiment::Spectrum => {
            let state = run.stationary()?;
            spectrum_csv(&mut run, &state.omega0)?;
        }
        Experiment::Decay => decay(&mut run)?,
        Experiment::Bounded => bounded(&mut run, exec)?,
        Experiment::Frequencies => frequencies(&mut run)?,
        Experiment::Attractor => attractor(&mut run, exec)?,
    }
    let manifest = RunManifest {
        experiment: cfg.experiment.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_echo(cfg),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        summary: run.summary,
        contracts: run.contracts,
        files: run.files,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&manifest_path, text.as_bytes()).map_err(|source| RunError::Io { path: manifest_path, source })?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> std::io::Result<RunManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
    serde_json::from_str(&text).map_err(std::io::Error::other)
}

fn config_echo(cfg: &RunConfig) -> Value {
    let p = &cfg.params;
    let g = p.grid();
    json!({
        "source": cfg.config_table,
        "forcing": cfg.forcing_table,
        "resolved": {
            "model": { "nu": p.nu(), "r": p.r(), "beta": p.beta(), "nx": g.nx(), "ny": g.ny(), "lx": g.lx(), "ly": g.ly() },
            "forcing": { "file": cfg.forcing_path.display().to_string(), "eta": cfg.spec.eta(), "terms": cfg.spec.terms().len() },
            "stepper": { "scheme": cfg.stepper.scheme.name(), "dt": cfg.stepper.dt, "osc_resolution": cfg.stepper.osc_resolution },
            "experiment": cfg.settings,
        },
    })
}

fn simulate(run: &mut Run) -> Result<(), RunError> {
    let s = run.cfg.settings.clone();
    let eps = s.epsilon;
    let w0 = run.initial_state();
    let traj = integrate(&run.model, eps, &w0, &run.cfg.spec, 0.0, s.horizon / eps, &run.cfg.stepper, s.sample_every)
        .map_err(run.fail("integration"))?;
    let mut table = CsvTable::new(&["time", "l2_norm", "h1_norm", "d_a_norm", "energy"]);
    for (i, (tau, w)) in traj.iter().enumerate() {
        let energy = 0.5 * w.sobolev_norm(-0.5).map_err(run.fail("norms"))?.powi(2);
        let d_a = w.sobolev_norm(1.0).map_err(run.fail("norms"))?;
        table.push(vec![(eps * tau).into(), w.norm().into(), w.gradient_norm().into(), d_a.into(), energy.into()]);
        if s.snapshots {
            run.snapshot(&format!("snapshots/sample_{i:06}.qgf"), w)?;
        }
    }
    run.csv("trajectory.csv", &table)?;
    let last = traj.last().expect("trajectories hold both endpoints");
    run.snapshot("final.qgf", last)?;
    run.note("samples", json!(traj.len()));
    run.note("final_l2", json!(last.norm()));
    run.note("final_half", json!(last.gradient_norm()));
    Ok(())
}

fn compare<E: Executor>(run: &mut Run, exec: &E) -> Result<(), RunError> {
    let s = &run.cfg.settings;
    let cfg = ComparisonConfig {
        params: run.cfg.params,
        spec: run.cfg.spec.clone(),
        horizon: s.horizon,
        epsilons: s.epsilons.clone(),
        w0: run.initial_state(),
        stepper: run.cfg.stepper,
        sample_every: s.sample_every,
    };
    let report = compare_finite_interval(&cfg, exec).map_err(run.fail("comparison"))?;
    let mut table = CsvTable::new(&["epsilon", "sup_half", "sup_da", "end_half"]);
    for r in &report.records {
        table.push(vec![r.epsilon.into(), r.sup_half.into(), r.sup_da.into(), r.end_half.into()]);
    }
    run.csv("comparison.csv", &table)?;
    let sup = report.sup_half();
    run.note("sup_half", json!(sup));
    run.note("sup_da", json!(report.records.iter().map(|r| r.sup_da).collect::<Vec<_>>()));
    let held = nonincreasing_within(&sup, COMPARE_RIPPLE);
    run.contract("sup_half nonincreasing in epsilon within 10% ripple", held, format!("{sup:?}"));
    Ok(())
}

fn aux_v<E: Executor>(run: &mut Run, exec: &E) -> Result<(), RunError> {
    let s = &run.cfg.settings;
    let report = epsilon_v_decay(&run.model, &run.cfg.spec, &s.epsilons, s.alpha, &run.cfg.stepper, exec).map_err(run.fail("corrector"))?;
    let mut table = CsvTable::new(&["epsilon", "alpha", "sup_eps_v"]);
    for r in &report.records {
        table.push(vec![r.epsilon.into(), r.alpha.into(), r.sup_eps_v.into()]);
    }
    run.csv("aux_v.csv", &table)?;
    let sup = report.sup_eps_v();
    run.note("sup_eps_v", json!(sup));
    run.contract("sup |eps v| strictly decreasing in epsilon", strictly_decreasing(&sup), format!("{sup:?}"));
    Ok(())
}

fn stationary(run: &mut Run) -> Result<(), RunError> {
    let state = run.stationary()?;
    let lambda1 = run.cfg.params.spectral_gap_condition().lambda1;
    run.note("lambda1", json!(lambda1));
    run.note("unique_by_smallness", json!(corollary_smallness(&run.cfg.params, run.cfg.spec.mean())));
    let tol = run.cfg.settings.tol;
    run.contract("newton residual below tolerance", state.residual_norm <= tol, format!("{:e} vs {tol:e}", state.residual_norm));
    Ok(())
}

fn spectrum_csv(run: &mut Run, omega0: &SpectralField) -> Result<SpectrumReport, RunError> {
    let report = run.spectrum(omega0)?;
    let mut table = CsvTable::new(&["re", "im"])
        .comment(format!("truncation={} gap_a={:.16e} n_unstable={}", report.truncation, report.gap_a, report.n_unstable));
    for z in &report.eigenvalues {
        table.push(vec![z.re.into(), z.im.into()]);
    }
    run.csv("spectrum.csv", &table)?;
    Ok(report)
}

/// Requires `N = 0`; an unstable linearization is a contract failure.
fn stable_spectrum(run: &mut Run) -> Result<Option<(StationaryState, SpectrumReport)>, RunError> {
    let state = run.stationary()?;
    let report = spectrum_csv(run, &state.omega0)?;
    let stable = report.is_stable() && report.gap_a > 0.0;
    run.contract("stationary state is linearly stable", stable, format!("N = {}, gap_a = {:e}", report.n_unstable, report.gap_a));
    Ok(stable.then_some((state, report)))
}

fn tracking(run: &Run, epsilon: f64, horizon: f64) -> TrackingConfig {
    TrackingConfig { sample_every: run.cfg.settings.sample_every, ..TrackingConfig::new(epsilon, horizon, run.cfg.stepper) }
}

fn decay(run: &mut Run) -> Result<(), RunError> {
    let Some((state, report)) = stable_spectrum(run)? else { return Ok(()) };
    let s = run.cfg.settings.clone();
    let eps = s.epsilon;
    let period = run.period();
    let bounded = track_bounded_solution(&run.model, &run.cfg.spec, &state.omega0, &report, &tracking(run, eps, period))
        .map_err(run.fail("bounded solution"))?;
    let perturbation = SpectralField::from_modes(*run.model.grid(), &s.perturbation).map_err(run.fail("perturbation"))?;
    let horizon = s.efolds / (eps * report.gap_a);
    debug!("decay horizon {horizon} in fast time");
    let result = decay_experiment(&run.model, &run.cfg.spec, &bounded, &perturbation, &report, horizon, s.sample_every);
    let r = match result {
        Ok(r) => r,
        Err(qg_core::Error::NoDecay { initial, reached }) => {
            run.contract("perturbation decays", false, format!("distance grew from {initial:e} to {reached:e}"));
            return Ok(());
        }
        Err(e) => return Err(run.fail("decay")(e)),
    };
    let mut table = CsvTable::new(&["t", "distance", "log_distance"]);
    for ((tau, d), l) in r.times.iter().zip(&r.distance).zip(&r.log_distance) {
        table.push(vec![(eps * tau).into(), (*d).into(), (*l).into()]);
    }
    run.csv("decay.csv", &table)?;
    run.note("fitted_rate", json!(r.fitted_rate));
    run.note("reference_rate", json!(r.reference_rate));
    run.note("monotone_at_period_boundaries", json!(r.monotone_at_period_boundaries(period)));
    run.contract(
        "fitted decay rate at least half of epsilon*gap_a",
        r.fitted_rate >= 0.5 * r.reference_rate,
        format!("{:e} vs {:e}", r.fitted_rate, r.reference_rate),
    );
    Ok(())
}

/// True when each entry is below its predecessor, entries at the noise
/// floor excepted.
fn decreasing_above_floor(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0] || w[1] <= NOISE_FLOOR)
}

fn bounded<E: Executor>(run: &mut Run, exec: &E) -> Result<(), RunError> {
    let Some((state, report)) = stable_spectrum(run)? else { return Ok(()) };
    let s = run.cfg.settings.clone();
    let horizon = s.periods * run.period();
    let runs = {
        let r: &Run = run;
        exec.map(s.epsilons.len(), |i| {
            track_bounded_solution(&r.model, &r.cfg.spec, &state.omega0, &report, &tracking(r, s.epsilons[i], horizon))
                .map(|b| b.sup_distance)
        })
    };
    let sups = runs.into_iter().collect::<Result<Vec<_>, _>>().map_err(run.fail("bounded solution"))?;
    let mut table = CsvTable::new(&["epsilon", "sup_distance"]);
    for (e, d) in s.epsilons.iter().zip(&sups) {
        table.push(vec![(*e).into(), (*d).into()]);
    }
    run.csv("bounded.csv", &table)?;
    run.note("sup_distance", json!(sups));
    run.contract("sup distance to omega0 decreasing in epsilon", decreasing_above_floor(&sups), format!("{sups:?}"));
    Ok(())
}

fn frequencies(run: &mut Run) -> Result<(), RunError> {
    let Some((state, report)) = stable_spectrum(run)? else { return Ok(()) };
    let s = run.cfg.settings.clone();
    let eps = s.epsilon;
    let horizon = s.periods * run.period();
    let bounded = track_bounded_solution(&run.model, &run.cfg.spec, &state.omega0, &report, &tracking(run, eps, horizon))
        .map_err(run.fail("bounded solution"))?;
    let basis = run.cfg.spec.with_eta(1.0 / eps).map_err(run.fail("frequency basis"))?.frequency_basis();
    let probe = SpectralField::mode(*run.model.grid(), s.probe.0, s.probe.1, 1.0).map_err(run.fail("probe"))?;
    let response = analyze_response(&bounded.trajectory, &probe, &basis).map_err(run.fail("harmonic analysis"))?;
    let mut table = CsvTable::new(&["frequency", "magnitude", "kind"]);
    for (f, m) in &response.candidates {
        table.push(vec![(*f).into(), (*m).into(), "candidate".into()]);
    }
    for (f, m) in &response.controls {
        table.push(vec![(*f).into(), (*m).into(), "control".into()]);
    }
    run.csv("frequencies.csv", &table)?;
    run.note("frequency_basis", json!(basis));
    run.note("control_ratio", json!(response.control_ratio()));
    run.contract("control magnitudes below 5% of the candidate maximum", response.holds(), format!("ratio {:e}", response.control_ratio()));
    Ok(())
}

fn attractor<E: Executor>(run: &mut Run, exec: &E) -> Result<(), RunError> {
    let s = &run.cfg.settings;
    let cfg = AttractorConfig {
        params: run.cfg.params,
        spec: run.cfg.spec.clone(),
        etas: s.etas.clone(),
        n_initial: s.members,
        window: SampleWindow { transient: s.transient, span: s.span, samples: s.samples },
        stepper: run.cfg.stepper,
        seed: s.seed.unwrap_or(0),
    };
    let records = attractor_distance(&cfg, exec).map_err(run.fail("attractor distance"))?;
    let self_distance = averaged_self_distance(&cfg, exec).map_err(run.fail("averaged self-distance"))?;
    let mut table = CsvTable::new(&["eta", "dist", "n_samples"]);
    for r in &records {
        table.push(vec![r.eta.into(), r.dist.into(), Cell::from(r.n_samples)]);
    }
    run.csv("attractor.csv", &table)?;
    let dist: Vec<f64> = records.iter().map(|r| r.dist).collect();
    run.note("dist", json!(dist));
    run.note("self_distance", json!(self_distance));
    let (first, last) = (dist[0], dist[dist.len() - 1]);
    run.contract("dist nonincreasing in eta within 15% ripple", nonincreasing_within(&dist, ATTRACTOR_RIPPLE), format!("{dist:?}"));
    run.contract(
        "dist at the largest eta below dist at the smallest",
        dist.len() < 2 || last < first || last <= SELF_DISTANCE_BOUND,
        format!("{last:e} vs {first:e}"),
    );
    run.contract("averaged self-distance below 1e-6", self_distance < SELF_DISTANCE_BOUND, format!("{self_distance:e}"));
    Ok(())
}
