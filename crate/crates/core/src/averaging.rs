//! Full versus averaged dynamics on a finite slow-time interval, and the
//! bounded oscillatory corrector `v(τ, ε)`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::forcing::{Forcing, ForcingSpec};
use crate::grid::Grid;
use crate::model::{ModelParams, QgModel};
use crate::parallel::Executor;
use crate::stepper::{integrate, run_lattice, step_count, QgSystem, SemiLinear, Stepper, StepperConfig};

/// Default spin-up length, in e-foldings of the guaranteed decay rate.
pub const SPINUP_EFOLDS: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct ComparisonConfig {
    pub params: ModelParams,
    pub spec: ForcingSpec,
    /// Slow-time horizon `T`; each run covers `τ ∈ [0, T/ε]`.
    pub horizon: f64,
    /// Strictly decreasing, each in `(0, 1]`.
    pub epsilons: Vec<f64>,
    pub w0: SpectralField,
    pub stepper: StepperConfig,
    pub sample_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRecord {
    pub epsilon: f64,
    /// `max ‖ω − ω̄‖_{1/2}` over the samples in `[0, T/ε]`.
    pub sup_half: f64,
    /// Same, in the `D(A)` proxy `‖Δ·‖`.
    pub sup_da: f64,
    pub end_half: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub records: Vec<ComparisonRecord>,
}

impl ComparisonReport {
    pub fn sup_half(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sup_half).collect()
    }
}

/// True when every entry is at most `(1 + ripple)` times its predecessor.
pub fn nonincreasing_within(values: &[f64], ripple: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + ripple))
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

pub(crate) fn validate_epsilons(epsilons: &[f64]) -> Result<()> {
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("epsilons must not be empty".into()));
    }
    if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0 && *e <= 1.0)) {
        return Err(Error::InvalidParameter("epsilons must lie in (0, 1]".into()));
    }
    if !strictly_decreasing(epsilons) {
        return Err(Error::InvalidParameter("epsilons must be strictly decreasing".into()));
    }
    Ok(())
}

impl ComparisonConfig {
    pub fn validate(&self) -> Result<()> {
        validate_epsilons(&self.epsilons)?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParameter(format!("horizon T = {} must be positive", self.horizon)));
        }
        self.params.require_gap()?;
        if self.w0.grid() != self.params.grid() || self.spec.mean().grid() != self.params.grid() {
            return Err(Error::GridMismatch);
        }
        self.stepper.check_resolution(self.spec.fastest_period())
    }
}

/// Integrates the averaged equation over slow time `[0, T]` from `w0` and
/// checks the energy bound `‖ω(t)‖ ≤ max(‖w0‖, ‖f₀‖/(λ₁μ₁₁))`.
pub fn check_dissipative_preroll(model: &QgModel, w0: &SpectralField, f0: &SpectralField, horizon: f64, cfg: &StepperConfig) -> Result<()> {
    let rate = model.params().guaranteed_decay_rate()?;
    let bound = w0.norm().max(f0.norm() / rate) * (1.0 + 1e-3) + 1e-12;
    let traj = integrate(model, 1.0, w0, f0, 0.0, horizon, cfg, 1)?;
    for (t, w) in traj.iter() {
        let norm = w.norm();
        if norm > bound {
            return Err(Error::NotDissipative { time: t, norm, bound });
        }
    }
    Ok(())
}

/// Runs the full and averaged equations from the same `w0` over
/// `τ ∈ [0, T/ε]` for every `ε`, on one shared step lattice per `ε`, and
/// records sampled sup norms of the difference.
pub fn compare_finite_interval<E: Executor>(cfg: &ComparisonConfig, exec: &E) -> Result<ComparisonReport> {
    cfg.validate()?;
    let model = QgModel::new(cfg.params);
    check_dissipative_preroll(&model, &cfg.w0, cfg.spec.mean(), cfg.horizon, &cfg.stepper)?;
    let runs = exec.map(cfg.epsilons.len(), |i| compare_one(&model, cfg, cfg.epsilons[i]));
    Ok(ComparisonReport { records: runs.into_iter().collect::<Result<_>>()? })
}

fn compare_one(model: &QgModel, cfg: &ComparisonConfig, epsilon: f64) -> Result<ComparisonRecord> {
    let spec = cfg.spec.with_eta(1.0 / epsilon)?;
    let full = QgSystem::new(model, epsilon, &spec)?;
    let averaged = QgSystem::new(model, epsilon, spec.mean())?;
    let span = cfg.horizon / epsilon;
    let n = step_count(span, cfg.stepper.dt);
    let h = span / n as f64;

    let mut reference = Vec::new();
    run_lattice(&averaged, cfg.stepper.scheme, &cfg.w0, 0.0, h, n, cfg.sample_every, |_, w| {
        reference.push(w.clone());
        Ok(())
    })?;

    let mut record = ComparisonRecord { epsilon, sup_half: 0.0, sup_da: 0.0, end_half: 0.0 };
    let mut idx = 0;
    run_lattice(&full, cfg.stepper.scheme, &cfg.w0, 0.0, h, n, cfg.sample_every, |_, w| {
        let z = w - &reference[idx];
        idx += 1;
        let half = z.gradient_norm();
        record.sup_half = record.sup_half.max(half);
        record.sup_da = record.sup_da.max(z.sobolev_norm(1.0)?);
        record.end_half = half;
        Ok(())
    })?;
    Ok(record)
}

/// `v_τ = −εAv + f₀ − f(τ)`: the explicit part is `−εβ∂ₓΔ⁻¹v + f₀ − f(τ)`.
#[derive(Debug)]
pub struct AuxSystem<'m, F> {
    model: &'m QgModel,
    epsilon: f64,
    mean: SpectralField,
    forcing: F,
    rates: Vec<f64>,
}

impl<'m, F: Forcing> AuxSystem<'m, F> {
    pub fn new(model: &'m QgModel, epsilon: f64, mean: SpectralField, forcing: F) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1]")));
        }
        if mean.grid() != model.grid() {
            return Err(Error::GridMismatch);
        }
        let rates = model.dissipation().iter().map(|d| epsilon * d).collect();
        Ok(Self { model, epsilon, mean, forcing, rates })
    }
}

impl<F: Forcing> SemiLinear for AuxSystem<'_, F> {
    fn grid(&self) -> &Grid {
        self.model.grid()
    }

    fn decay_rates(&self) -> &[f64] {
        &self.rates
    }

    fn explicit(&self, tau: f64, v: &SpectralField) -> Result<SpectralField> {
        let mut out = self.mean.clone();
        out -= &self.forcing.at(tau);
        out.axpy(-self.epsilon, &self.model.beta_term(v)?);
        Ok(out)
    }

    fn fastest_period(&self) -> Option<f64> {
        self.forcing.fastest_period()
    }
}

/// Samples the bounded solution of `v_τ = −εAv + f₀ − f(τ)` at `tau_grid`
/// (nondecreasing), approximated by integrating from `v = 0` at
/// `τ_min − 10/(ε λ₁ μ₁₁)`.
pub fn aux_v(model: &QgModel, spec: &ForcingSpec, epsilon: f64, tau_grid: &[f64], cfg: &StepperConfig) -> Result<Vec<SpectralField>> {
    aux_v_with(model, spec.mean().clone(), spec, epsilon, tau_grid, cfg, SPINUP_EFOLDS)
}

/// [`aux_v`] for any forcing with a given mean and spin-up length.
pub fn aux_v_with<F: Forcing>(
    model: &QgModel,
    mean: SpectralField,
    forcing: F,
    epsilon: f64,
    tau_grid: &[f64],
    cfg: &StepperConfig,
    spinup_efolds: f64,
) -> Result<Vec<SpectralField>> {
    let rate = model.params().guaranteed_decay_rate()?;
    let spinup = spinup_efolds / (epsilon * rate);
    if !spinup.is_finite() {
        return Err(Error::InvalidParameter("spin-up horizon is not finite".into()));
    }
    let Some(&tau_min) = tau_grid.first() else {
        return Ok(Vec::new());
    };
    if tau_grid.windows(2).any(|w| w[1] < w[0]) || tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("tau grid must be finite and nondecreasing".into()));
    }
    let system = AuxSystem::new(model, epsilon, mean, forcing)?;
    cfg.check_resolution(system.fastest_period())?;

    let h = cfg.dt;
    let n_spin = step_count(spinup, h);
    let start = tau_min - n_spin as f64 * h;
    let mut stepper = Stepper::new(&system, cfg.scheme, h);
    let mut v = SpectralField::zeros(*model.grid());
    let mut done = 0usize;
    let mut out = Vec::with_capacity(tau_grid.len());
    for &target in tau_grid {
        let x = (target - start) / h;
        let target_step = if (x - x.round()).abs() < 1e-6 { x.round() as usize } else { x.floor() as usize };
        while done < target_step {
            stepper.step(start + done as f64 * h, &mut v)?;
            done += 1;
            if !v.is_finite() {
                return Err(Error::BlowUp { time: start + (done - 1) as f64 * h });
            }
        }
        let remainder = target - (start + done as f64 * h);
        if remainder > 1e-9 * h {
            let mut partial = Stepper::new(&system, cfg.scheme, remainder);
            let mut w = v.clone();
            partial.step(start + done as f64 * h, &mut w)?;
            out.push(w);
        } else {
            out.push(v.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxVRecord {
    pub epsilon: f64,
    pub alpha: f64,
    /// `max ‖εv(τ, ε)‖_α` over the probe times.
    pub sup_eps_v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxVReport {
    pub records: Vec<AuxVRecord>,
}

impl AuxVReport {
    pub fn sup_eps_v(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sup_eps_v).collect()
    }
}

/// Sixteen probe times over one slowest forcing period (`[0]` when steady).
pub fn probe_times(spec: &ForcingSpec) -> Vec<f64> {
    match spec.slowest_period() {
        Some(p) => (0..16).map(|j| j as f64 * p / 16.0).collect(),
        None => alloc::vec![0.0],
    }
}

/// `max_τ ‖εv(τ, ε)‖_α` over [`probe_times`] for each `ε`.
pub fn epsilon_v_decay<E: Executor>(
    model: &QgModel,
    spec: &ForcingSpec,
    epsilons: &[f64],
    alpha: f64,
    cfg: &StepperConfig,
    exec: &E,
) -> Result<AuxVReport> {
    validate_epsilons(epsilons)?;
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::UnsupportedIndex(alpha));
    }
    model.params().require_gap()?;
    let probes = probe_times(spec);
    let runs = exec.map(epsilons.len(), |i| -> Result<AuxVRecord> {
        let epsilon = epsilons[i];
        let vs = aux_v(model, spec, epsilon, &probes, cfg)?;
        let mut sup = 0.0f64;
        for v in &vs {
            sup = sup.max(epsilon * v.sobolev_norm(alpha)?);
        }
        Ok(AuxVRecord { epsilon, alpha, sup_eps_v: sup })
    });
    Ok(AuxVReport { records: runs.into_iter().collect::<Result<_>>()? })
}

/// Bounded periodic response of `v' = −kv − a cos(ωτ + φ)`:
/// `v = P cos(ωτ + φ) + Q sin(ωτ + φ)` with `P = −ak/(ω² + k²)`,
/// `Q = −aω/(ω² + k²)`.
pub fn scalar_aux_closed_form(k: f64, a: f64, omega: f64, phase: f64, tau: f64) -> f64 {
    let d = omega * omega + k * k;
    let theta = omega * tau + phase;
    -a * k / d * theta.cos() - a * omega / d * theta.sin()
}

/// Fast-time period of a single-frequency term, `2π/ω`.
pub fn fast_period(omega: f64) -> f64 {
    2.0 * PI / omega
}
