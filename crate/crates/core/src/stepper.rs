//! Time stepping for semilinear systems `u' = −c∘u + N(τ, u)` with a
//! diagonal stiff part `c ≥ 0`.
//!
//! For the vorticity equation in fast time the stiff part is
//! `ε(νμ_kl + r)`; the β term, the Jacobian and the forcing form `N`.
//! Two schemes are provided: second-order exponential time differencing
//! (stiff part integrated exactly) and Crank–Nicolson/Adams–Bashforth 2
//! with a Heun startup step.

use alloc::vec::Vec;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::forcing::Forcing;
use crate::grid::Grid;
use crate::model::{ModelParams, QgModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Crank–Nicolson on the stiff part, Adams–Bashforth 2 on the rest.
    ImexCnAb2,
    /// Cox–Matthews ETD2RK: exact stiff part, two-stage explicit part.
    #[default]
    EtdRk2,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ImexCnAb2 => "imex-cn-ab2",
            Scheme::EtdRk2 => "etd-rk2",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex-cn-ab2" => Ok(Scheme::ImexCnAb2),
            "etd-rk2" => Ok(Scheme::EtdRk2),
            other => Err(Error::InvalidParameter(alloc::format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    /// Step in fast time.
    pub dt: f64,
    pub scheme: Scheme,
    /// Minimum number of steps per fastest forcing period.
    pub osc_resolution: usize,
}

impl StepperConfig {
    pub const DEFAULT_OSC_RESOLUTION: usize = 32;

    pub fn new(dt: f64, scheme: Scheme, osc_resolution: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("dt = {dt} must be positive")));
        }
        if osc_resolution < 8 {
            return Err(Error::InvalidParameter(alloc::format!("osc_resolution = {osc_resolution} must be at least 8")));
        }
        Ok(Self { dt, scheme, osc_resolution })
    }

    /// The largest step allowed for a forcing with the given fastest period,
    /// `period / osc_resolution`.
    pub fn resolving(period: f64, scheme: Scheme, osc_resolution: usize) -> Result<Self> {
        Self::new(period / osc_resolution as f64, scheme, osc_resolution)
    }

    pub fn max_dt(&self, fastest_period: Option<f64>) -> Option<f64> {
        fastest_period.map(|p| p / self.osc_resolution as f64)
    }

    pub fn check_resolution(&self, fastest_period: Option<f64>) -> Result<()> {
        match self.max_dt(fastest_period) {
            Some(max_dt) if self.dt > max_dt * (1.0 + 1e-12) => Err(Error::UnderResolved { dt: self.dt, max_dt }),
            _ => Ok(()),
        }
    }
}

/// A semilinear system with diagonal stiff part.
pub trait SemiLinear {
    fn grid(&self) -> &Grid;
    /// Nonnegative per-mode decay rates `c`.
    fn decay_rates(&self) -> &[f64];
    /// The explicitly treated part `N(τ, u)`.
    fn explicit(&self, tau: f64, u: &SpectralField) -> Result<SpectralField>;
    fn fastest_period(&self) -> Option<f64> {
        None
    }
}

/// The vorticity equation in fast time,
/// `ω_τ = −ε(Aω + J(Δ⁻¹ω, ω) − f(τ))`.
#[derive(Debug)]
pub struct QgSystem<'m, F> {
    model: &'m QgModel,
    epsilon: f64,
    forcing: F,
    rates: Vec<f64>,
}

impl<'m, F: Forcing> QgSystem<'m, F> {
    pub fn new(model: &'m QgModel, epsilon: f64, forcing: F) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("epsilon = {epsilon} must be positive")));
        }
        let rates = model.dissipation().iter().map(|d| epsilon * d).collect();
        Ok(Self { model, epsilon, forcing, rates })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl<F: Forcing> SemiLinear for QgSystem<'_, F> {
    fn grid(&self) -> &Grid {
        self.model.grid()
    }

    fn decay_rates(&self) -> &[f64] {
        &self.rates
    }

    fn explicit(&self, tau: f64, w: &SpectralField) -> Result<SpectralField> {
        let mut out = self.forcing.at(tau);
        out -= &self.model.beta_term(w)?;
        out -= &self.model.advection(w)?;
        Ok(out.scaled(self.epsilon))
    }

    fn fastest_period(&self) -> Option<f64> {
        self.forcing.fastest_period()
    }
}

#[derive(Debug, Clone)]
enum Coefficients {
    Etd { decay: Vec<f64>, phi1: Vec<f64>, phi2: Vec<f64> },
    Cn { ratio: Vec<f64>, gain: Vec<f64> },
}

impl Coefficients {
    fn new(scheme: Scheme, rates: &[f64], h: f64) -> Self {
        match scheme {
            Scheme::EtdRk2 => {
                let mut decay = Vec::with_capacity(rates.len());
                let mut phi1 = Vec::with_capacity(rates.len());
                let mut phi2 = Vec::with_capacity(rates.len());
                for &c in rates {
                    let x = c * h;
                    decay.push((-x).exp());
                    if x < 1e-3 {
                        phi1.push(h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0));
                        phi2.push(h * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0));
                    } else {
                        let em1 = libm::expm1(-x);
                        phi1.push(h * (-em1 / x));
                        phi2.push(h * ((x + em1) / (x * x)));
                    }
                }
                Coefficients::Etd { decay, phi1, phi2 }
            }
            Scheme::ImexCnAb2 => {
                let ratio = rates.iter().map(|c| (1.0 - 0.5 * c * h) / (1.0 + 0.5 * c * h)).collect();
                let gain = rates.iter().map(|c| h / (1.0 + 0.5 * c * h)).collect();
                Coefficients::Cn { ratio, gain }
            }
        }
    }
}

/// One-step driver with the history needed by the multistep scheme.
#[derive(Debug)]
pub struct Stepper<'s, S> {
    system: &'s S,
    scheme: Scheme,
    h: f64,
    coeffs: Coefficients,
    previous: Option<SpectralField>,
}

impl<'s, S: SemiLinear> Stepper<'s, S> {
    pub fn new(system: &'s S, scheme: Scheme, h: f64) -> Self {
        let coeffs = Coefficients::new(scheme, system.decay_rates(), h);
        Self { system, scheme, h, coeffs, previous: None }
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Forgets the multistep history; the next step restarts.
    pub fn reset(&mut self) {
        self.previous = None;
    }

    /// Advances `u` from `tau` to `tau + h`.
    pub fn step(&mut self, tau: f64, u: &mut SpectralField) -> Result<()> {
        let n0 = self.system.explicit(tau, u)?;
        match &self.coeffs {
            Coefficients::Etd { decay, phi1, phi2 } => {
                let mut a = u.clone();
                for (((a, e), p), n) in a.coeffs_mut().iter_mut().zip(decay).zip(phi1).zip(n0.coeffs()) {
                    *a = e * *a + p * n;
                }
                let n1 = self.system.explicit(tau + self.h, &a)?;
                for ((((out, a), p), n1), n0) in u.coeffs_mut().iter_mut().zip(a.coeffs()).zip(phi2).zip(n1.coeffs()).zip(n0.coeffs()) {
                    *out = a + p * (n1 - n0);
                }
            }
            Coefficients::Cn { ratio, gain } => {
                match self.previous.take() {
                    Some(prev) => {
                        for ((((out, r), g), n0), np) in u.coeffs_mut().iter_mut().zip(ratio).zip(gain).zip(n0.coeffs()).zip(prev.coeffs())
                        {
                            *out = r * *out + g * (1.5 * n0 - 0.5 * np);
                        }
                    }
                    None => {
                        let mut p = u.clone();
                        for (((p, r), g), n) in p.coeffs_mut().iter_mut().zip(ratio).zip(gain).zip(n0.coeffs()) {
                            *p = r * *p + g * n;
                        }
                        let n1 = self.system.explicit(tau + self.h, &p)?;
                        for ((((out, r), g), n0), n1) in u.coeffs_mut().iter_mut().zip(ratio).zip(gain).zip(n0.coeffs()).zip(n1.coeffs()) {
                            *out = r * *out + g * 0.5 * (n0 + n1);
                        }
                    }
                }
                self.previous = Some(n0);
            }
        }
        Ok(())
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

/// Runs `n_steps` steps of size `h` from `tau0`, calling `observe` at step 0,
/// every `sample_every` steps and at the final step. Returns the final state.
///
/// Step `i` starts at `tau0 + i·h` exactly, so runs that share a lattice
/// see identical forcing phases.
#[allow(clippy::too_many_arguments)]
pub fn run_lattice<S: SemiLinear>(
    system: &S,
    scheme: Scheme,
    u0: &SpectralField,
    tau0: f64,
    h: f64,
    n_steps: usize,
    sample_every: usize,
    mut observe: impl FnMut(f64, &SpectralField) -> Result<()>,
) -> Result<SpectralField> {
    if u0.grid() != system.grid() {
        return Err(Error::GridMismatch);
    }
    let sample_every = sample_every.max(1);
    let mut stepper = Stepper::new(system, scheme, h);
    let mut u = u0.clone();
    observe(tau0, &u)?;
    for i in 0..n_steps {
        let tau = tau0 + i as f64 * h;
        stepper.step(tau, &mut u)?;
        if !u.is_finite() {
            return Err(Error::BlowUp { time: tau });
        }
        let done = i + 1;
        if done % sample_every == 0 || done == n_steps {
            observe(tau0 + done as f64 * h, &u)?;
        }
    }
    Ok(u)
}

/// Number of steps of size at most `dt` covering `span`.
pub fn step_count(span: f64, dt: f64) -> usize {
    let n = (span / dt * (1.0 - 1e-12)).ceil();
    (n as usize).max(1)
}

/// Sampled solution of the vorticity equation. `times` are fast times `τ`;
/// original time is `t = ε·τ`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SpectralField>,
    params: ModelParams,
    epsilon: f64,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralField>, params: ModelParams, epsilon: f64) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::ShapeMismatch { expected: times.len(), found: states.len() });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("trajectory times must be strictly increasing".into()));
        }
        if states.iter().any(|s| s.grid() != params.grid()) {
            return Err(Error::GridMismatch);
        }
        if states.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { times, states, params, epsilon })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&SpectralField> {
        self.states.last()
    }

    /// `(τ, state)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &SpectralField)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

/// Integrates `ω_τ = −ε(Aω + J(Δ⁻¹ω, ω) − f(τ))` from `t0` to `t1` (fast
/// time) and samples every `sample_every` steps, both endpoints included.
///
/// The step is `(t1 − t0)/n ≤ cfg.dt`. Forcing with a declared fastest
/// period `P` requires `cfg.dt ≤ P/cfg.osc_resolution`.
#[allow(clippy::too_many_arguments)]
pub fn integrate<F: Forcing>(
    model: &QgModel,
    epsilon: f64,
    w0: &SpectralField,
    forcing: F,
    t0: f64,
    t1: f64,
    cfg: &StepperConfig,
    sample_every: usize,
) -> Result<Trajectory> {
    if t1.is_nan() || t0.is_nan() || t1 <= t0 {
        return Err(Error::InvalidParameter(alloc::format!("end time {t1} must exceed start time {t0}")));
    }
    let system = QgSystem::new(model, epsilon, forcing)?;
    cfg.check_resolution(system.fastest_period())?;
    let n = step_count(t1 - t0, cfg.dt);
    let h = (t1 - t0) / n as f64;
    let mut times = Vec::new();
    let mut states = Vec::new();
    run_lattice(&system, cfg.scheme, w0, t0, h, n, sample_every, |t, w| {
        times.push(t);
        states.push(w.clone());
        Ok(())
    })?;
    if let Some(last) = times.last_mut() {
        *last = t1;
    }
    Trajectory::new(times, states, *model.params(), epsilon)
}
