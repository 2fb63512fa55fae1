//! The bounded solution `ω*(τ)` near a stable stationary averaged state and
//! the decay of nearby solutions towards it.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::forcing::{Forcing, ForcingSpec};
use crate::model::QgModel;
use crate::spectrum::SpectrumReport;
use crate::stepper::{run_lattice, step_count, QgSystem, StepperConfig, Trajectory};

/// Distances below this are reported as this value.
pub const DISTANCE_FLOOR: f64 = 1e-13;
/// Samples below this are excluded from the rate fit.
const FIT_FLOOR: f64 = 100.0 * DISTANCE_FLOOR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingConfig {
    pub epsilon: f64,
    /// Recorded span in fast time, starting at `τ = 0`.
    pub horizon: f64,
    pub stepper: StepperConfig,
    pub sample_every: usize,
    /// Spin-up length in e-foldings of `ε·gap_a`.
    pub spinup_efolds: f64,
}

impl TrackingConfig {
    pub fn new(epsilon: f64, horizon: f64, stepper: StepperConfig) -> Self {
        Self { epsilon, horizon, stepper, sample_every: 1, spinup_efolds: crate::averaging::SPINUP_EFOLDS }
    }
}

#[derive(Debug, Clone)]
pub struct BoundedSolution {
    /// `ω*(τ)` sampled on `[0, horizon]`.
    pub trajectory: Trajectory,
    /// `max ‖ω*(τ) − ω₀‖_{1/2}` over the samples.
    pub sup_distance: f64,
    pub stepper: StepperConfig,
}

fn require_stable(spectrum: &SpectrumReport) -> Result<()> {
    if spectrum.n_unstable > 0 {
        return Err(Error::UnstableModes(spectrum.n_unstable));
    }
    if spectrum.gap_a.is_nan() || spectrum.gap_a <= 0.0 {
        return Err(Error::InvalidParameter("spectral gap must be positive".into()));
    }
    Ok(())
}

/// Approximates the solution bounded on the whole axis by its forward
/// attracting representative: the full equation is started at `ω₀` a time
/// `spinup_efolds/(ε·gap_a)` before `τ = 0` and recorded from `τ = 0` on.
///
/// Refuses to run when the linearization has unstable modes.
pub fn track_bounded_solution(
    model: &QgModel,
    spec: &ForcingSpec,
    omega0: &SpectralField,
    spectrum: &SpectrumReport,
    cfg: &TrackingConfig,
) -> Result<BoundedSolution> {
    require_stable(spectrum)?;
    let eps = cfg.epsilon;
    let spec = spec.with_eta(1.0 / eps)?;
    let system = QgSystem::new(model, eps, &spec)?;
    cfg.stepper.check_resolution(spec.fastest_period())?;
    let h = cfg.stepper.dt;
    let n_spin = step_count(cfg.spinup_efolds / (eps * spectrum.gap_a), h);
    let start = run_lattice(&system, cfg.stepper.scheme, omega0, -(n_spin as f64) * h, h, n_spin, usize::MAX, |_, _| Ok(()))?;

    let n_rec = step_count(cfg.horizon, h);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut sup = 0.0f64;
    run_lattice(&system, cfg.stepper.scheme, &start, 0.0, h, n_rec, cfg.sample_every, |t, w| {
        sup = sup.max((w - omega0).gradient_norm());
        times.push(t);
        states.push(w.clone());
        Ok(())
    })?;
    let trajectory = Trajectory::new(times, states, *model.params(), eps)?;
    Ok(BoundedSolution { trajectory, sup_distance: sup, stepper: cfg.stepper })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub times: Vec<f64>,
    /// `max(‖ω(τ) − ω*(τ)‖_{1/2}, DISTANCE_FLOOR)`.
    pub distance: Vec<f64>,
    pub log_distance: Vec<f64>,
    /// Least-squares decay rate in fast time; infinite when the distance
    /// starts at the floor.
    pub fitted_rate: f64,
    /// `ε·gap_a`, the linear prediction.
    pub reference_rate: f64,
}

impl DecayReport {
    /// Whether the distance sampled at multiples of `period` (from the
    /// first full period on) never increases until it reaches the fit floor.
    pub fn monotone_at_period_boundaries(&self, period: f64) -> bool {
        let mut last = f64::INFINITY;
        for (t, d) in self.times.iter().zip(&self.distance) {
            let x = t / period;
            if x < 1.0 - 1e-9 || (x - x.round()).abs() > 1e-6 {
                continue;
            }
            if *d <= FIT_FLOOR {
                break;
            }
            if *d > last {
                return false;
            }
            last = *d;
        }
        true
    }
}

/// Integrates from `ω*(0) + perturbation` alongside `ω*` over `[0, horizon]`
/// and fits the exponential decay rate of their distance in `‖·‖_{1/2}`.
/// The fit skips the first fastest forcing period and stops at the floor.
pub fn decay_experiment(
    model: &QgModel,
    spec: &ForcingSpec,
    bounded: &BoundedSolution,
    perturbation: &SpectralField,
    spectrum: &SpectrumReport,
    horizon: f64,
    sample_every: usize,
) -> Result<DecayReport> {
    require_stable(spectrum)?;
    let eps = bounded.trajectory.epsilon();
    let spec = spec.with_eta(1.0 / eps)?;
    let system = QgSystem::new(model, eps, &spec)?;
    let h = bounded.stepper.dt;
    let scheme = bounded.stepper.scheme;
    let n = step_count(horizon, h);
    let star0 = bounded.trajectory.states().first().ok_or(Error::InvalidParameter("empty bounded trajectory".into()))?;

    let mut reference = Vec::new();
    run_lattice(&system, scheme, star0, 0.0, h, n, sample_every, |_, w| {
        reference.push(w.clone());
        Ok(())
    })?;

    let mut times = Vec::new();
    let mut distance = Vec::new();
    let mut idx = 0;
    run_lattice(&system, scheme, &(star0 + perturbation), 0.0, h, n, sample_every, |t, w| {
        let d = (w - &reference[idx]).gradient_norm();
        idx += 1;
        times.push(t);
        distance.push(d.max(DISTANCE_FLOOR));
        Ok(())
    })?;

    let initial = distance[0];
    if let Some(reached) = distance.iter().copied().find(|d| *d > 10.0 * initial) {
        return Err(Error::NoDecay { initial, reached });
    }

    let skip = spec.fastest_period().unwrap_or(0.0);
    let mut fit = Vec::new();
    for (t, d) in times.iter().zip(&distance) {
        if *d <= FIT_FLOOR {
            break;
        }
        if *t >= skip - 1e-12 {
            fit.push((*t, d.ln()));
        }
    }
    let fitted_rate = if initial <= FIT_FLOOR {
        f64::INFINITY
    } else if fit.len() < 2 {
        return Err(Error::TrajectoryTooShort { needed: skip + 2.0 * h, available: horizon });
    } else {
        -least_squares_slope(&fit)
    };
    let log_distance = distance.iter().map(|d| d.ln()).collect();
    Ok(DecayReport { times, distance, log_distance, fitted_rate, reference_rate: eps * spectrum.gap_a })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
