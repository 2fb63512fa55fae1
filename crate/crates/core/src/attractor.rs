//! Ensemble sampling of the full and averaged attractors and their
//! Hausdorff semi-distance in `‖·‖_{1/2}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::forcing::{Forcing, ForcingSpec};
use crate::model::{ModelParams, QgModel};
use crate::parallel::Executor;
use crate::random::initial_state;
use crate::stepper::{run_lattice, step_count, QgSystem, StepperConfig};

/// Seeds of averaged-system members are shifted by this much, so the two
/// clouds start from different states.
pub const AVERAGED_SEED_OFFSET: u64 = 1 << 32;
/// `‖·‖_{1/2}` radius of the random initial states.
pub const INITIAL_RADIUS: f64 = 0.5;

/// Post-transient sampling window, in original (slow) time `t = ετ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleWindow {
    pub transient: f64,
    pub span: f64,
    /// Samples per member, evenly spaced over `span`.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorConfig {
    pub params: ModelParams,
    pub spec: ForcingSpec,
    pub etas: Vec<f64>,
    pub n_initial: usize,
    pub window: SampleWindow,
    /// Step in fast time; the same for every `η`.
    pub stepper: StepperConfig,
    pub seed: u64,
}

impl AttractorConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.require_gap()?;
        if self.etas.is_empty() || self.etas.iter().any(|e| !(e.is_finite() && *e >= 1.0)) {
            return Err(Error::InvalidParameter("eta values must be finite and at least 1".into()));
        }
        if self.n_initial == 0 || self.window.samples == 0 {
            return Err(Error::InvalidParameter("need at least one member and one sample".into()));
        }
        if !(self.window.transient >= 0.0 && self.window.span > 0.0) {
            return Err(Error::InvalidParameter("sample window must have a nonnegative transient and positive span".into()));
        }
        self.stepper.check_resolution(self.spec.fastest_period())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorRecord {
    pub eta: f64,
    pub dist: f64,
    /// Size of the full-system cloud.
    pub n_samples: usize,
}

/// `max_{s∈S} min_{s̄∈S̄} ‖s − s̄‖_{1/2}`; infinite when `reference` is empty.
pub fn semi_distance(samples: &[SpectralField], reference: &[SpectralField]) -> f64 {
    samples.iter().map(|s| reference.iter().map(|r| (s - r).gradient_norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

/// Post-transient samples of one member started from `initial_state(seed)`.
fn member_samples<F: Forcing>(
    model: &QgModel,
    forcing: F,
    epsilon: f64,
    window: &SampleWindow,
    stepper: &StepperConfig,
    seed: u64,
) -> Result<Vec<SpectralField>> {
    let system = QgSystem::new(model, epsilon, forcing)?;
    let h = stepper.dt;
    let w0 = initial_state(*model.grid(), seed, INITIAL_RADIUS);
    let n_trans = step_count(window.transient / epsilon, h);
    let start = run_lattice(&system, stepper.scheme, &w0, 0.0, h, n_trans, usize::MAX, |_, _| Ok(()))?;
    let every = step_count(window.span / epsilon / window.samples as f64, h);
    let mut out = Vec::with_capacity(window.samples);
    let tau0 = n_trans as f64 * h;
    run_lattice(&system, stepper.scheme, &start, tau0, h, every * window.samples, every, |tau, w| {
        if tau > tau0 {
            out.push(w.clone());
        }
        Ok(())
    })?;
    Ok(out)
}

/// For each `η`, samples the full system (forcing at `η`) and the averaged
/// system from `n_initial` seeded initial states on the same step lattice,
/// and reports the semi-distance from the full cloud to the averaged one.
pub fn attractor_distance<E: Executor>(cfg: &AttractorConfig, exec: &E) -> Result<Vec<AttractorRecord>> {
    cfg.validate()?;
    let model = QgModel::new(cfg.params);
    let members = cfg.n_initial;
    let per_eta = 2 * members;
    let clouds = exec.map(cfg.etas.len() * per_eta, |job| {
        let eta = cfg.etas[job / per_eta];
        let slot = job % per_eta;
        let spec = cfg.spec.with_eta(eta)?;
        if slot < members {
            member_samples(&model, &spec, 1.0 / eta, &cfg.window, &cfg.stepper, cfg.seed.wrapping_add(slot as u64))
        } else {
            let seed = cfg.seed.wrapping_add(AVERAGED_SEED_OFFSET).wrapping_add((slot - members) as u64);
            member_samples(&model, spec.mean(), 1.0 / eta, &cfg.window, &cfg.stepper, seed)
        }
    });
    let clouds: Vec<Vec<SpectralField>> = clouds.into_iter().collect::<Result<_>>()?;
    Ok(cfg
        .etas
        .iter()
        .zip(clouds.chunks(per_eta))
        .map(|(eta, chunk)| {
            let full: Vec<SpectralField> = chunk[..members].iter().flatten().cloned().collect();
            let averaged: Vec<SpectralField> = chunk[members..].iter().flatten().cloned().collect();
            AttractorRecord { eta: *eta, dist: semi_distance(&full, &averaged), n_samples: full.len() }
        })
        .collect())
}

/// Semi-distance between two averaged-system clouds started from disjoint
/// seed sets, integrated at `ε = 1/η` for the first `η`. Measures the
/// sampling floor of [`attractor_distance`].
pub fn averaged_self_distance<E: Executor>(cfg: &AttractorConfig, exec: &E) -> Result<f64> {
    cfg.validate()?;
    let model = QgModel::new(cfg.params);
    let eps = 1.0 / cfg.etas[0];
    let members = cfg.n_initial;
    let mean = cfg.spec.mean();
    let clouds = exec.map(2 * members, |slot| {
        let seed = if slot < members {
            cfg.seed.wrapping_add(slot as u64)
        } else {
            cfg.seed.wrapping_add(AVERAGED_SEED_OFFSET).wrapping_add((slot - members) as u64)
        };
        member_samples(&model, mean, eps, &cfg.window, &cfg.stepper, seed)
    });
    let clouds: Vec<Vec<SpectralField>> = clouds.into_iter().collect::<Result<_>>()?;
    let a: Vec<SpectralField> = clouds[..members].iter().flatten().cloned().collect();
    let b: Vec<SpectralField> = clouds[members..].iter().flatten().cloned().collect();
    Ok(semi_distance(&a, &b))
}
