//! Rapidly oscillating forcing as finite trigonometric sums.
//!
//! A [`ForcingSpec`] describes `f(x, y, ηt) = f₀ + Σ_j a_j cos(ω_j η t + φ_j)`
//! in the original time `t`. All evaluation happens in the fast time
//! `τ = ηt`, where the `j`-th term oscillates as `cos(ω_j τ + φ_j)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;

/// A time-dependent source term sampled in fast time.
pub trait Forcing {
    fn at(&self, tau: f64) -> SpectralField;

    /// Shortest oscillation period in fast time, `None` for steady forcing.
    fn fastest_period(&self) -> Option<f64> {
        None
    }
}

impl Forcing for SpectralField {
    fn at(&self, _tau: f64) -> SpectralField {
        self.clone()
    }
}

impl<F: Forcing + ?Sized> Forcing for &F {
    fn at(&self, tau: f64) -> SpectralField {
        (**self).at(tau)
    }

    fn fastest_period(&self) -> Option<f64> {
        (**self).fastest_period()
    }
}

/// Forcing given by a closure, with an optional declared fastest period.
pub struct FnForcing<F> {
    f: F,
    period: Option<f64>,
}

impl<F: Fn(f64) -> SpectralField> FnForcing<F> {
    pub fn new(f: F) -> Self {
        Self { f, period: None }
    }

    pub fn with_period(f: F, period: f64) -> Self {
        Self { f, period: Some(period) }
    }
}

impl<F> core::fmt::Debug for FnForcing<F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnForcing").field("period", &self.period).finish_non_exhaustive()
    }
}

impl<F: Fn(f64) -> SpectralField> Forcing for FnForcing<F> {
    fn at(&self, tau: f64) -> SpectralField {
        (self.f)(tau)
    }

    fn fastest_period(&self) -> Option<f64> {
        self.period
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTerm {
    pub amplitude: SpectralField,
    /// Base angular frequency in original time, before the `η` scaling.
    pub omega: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    mean: SpectralField,
    terms: Vec<ForcingTerm>,
    eta: f64,
}

/// Window-average error of a forcing against its mean, per window length.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageReport {
    pub windows: Vec<f64>,
    pub sigma: Vec<f64>,
    pub gamma: f64,
    /// Largest observed `sigma`.
    pub m_gamma: f64,
}

impl ForcingSpec {
    pub fn new(mean: SpectralField, terms: Vec<ForcingTerm>, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta >= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("eta = {eta} must be at least 1")));
        }
        for t in &terms {
            mean.check_grid(&t.amplitude)?;
            if !(t.omega.is_finite() && t.omega > 0.0) {
                return Err(Error::InvalidParameter(alloc::format!("term frequency {} must be positive", t.omega)));
            }
            if !t.phase.is_finite() {
                return Err(Error::InvalidParameter("term phase must be finite".into()));
            }
        }
        Ok(Self { mean, terms, eta })
    }

    /// `f ≡ f₀`.
    pub fn steady(mean: SpectralField) -> Self {
        Self { mean, terms: Vec::new(), eta: 1.0 }
    }

    pub fn mean(&self) -> &SpectralField {
        &self.mean
    }

    pub fn terms(&self) -> &[ForcingTerm] {
        &self.terms
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn epsilon(&self) -> f64 {
        1.0 / self.eta
    }

    pub fn is_steady(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.mean.clone(), self.terms.clone(), eta)
    }

    /// The same mean with every oscillating term removed.
    pub fn averaged(&self) -> Self {
        Self { mean: self.mean.clone(), terms: Vec::new(), eta: self.eta }
    }

    /// `f(τ)`, with `t = ετ` applied internally.
    pub fn evaluate(&self, tau: f64) -> SpectralField {
        let t = tau / self.eta;
        let mut out = self.mean.clone();
        for term in &self.terms {
            out.axpy((term.omega * self.eta * t + term.phase).cos(), &term.amplitude);
        }
        out
    }

    /// The time average `f₀`, exact for trigonometric sums.
    pub fn average(&self) -> SpectralField {
        self.mean.clone()
    }

    /// Slowest oscillation period in fast time.
    pub fn slowest_period(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.omega).reduce(f64::min).map(|w| 2.0 * PI / w)
    }

    /// `(1/T)∫_t^{t+T} f(τ) dτ − f₀`, in closed form.
    pub fn window_deviation(&self, t: f64, window: f64) -> SpectralField {
        let mut out = SpectralField::zeros(*self.mean.grid());
        for term in &self.terms {
            let w = term.omega;
            let c = ((w * (t + window) + term.phase).sin() - (w * t + term.phase).sin()) / (w * window);
            out.axpy(c, &term.amplitude);
        }
        out
    }

    /// `σ_γ(T) = max_t ‖(1/T)∫_t^{t+T} f − f₀‖_γ` over eight base points `t`
    /// spread over one slowest period.
    pub fn time_average_error(&self, gamma: f64, windows: &[f64]) -> Result<AverageReport> {
        if !(-1.0..=1.0).contains(&gamma) {
            return Err(Error::UnsupportedIndex(gamma));
        }
        if windows.iter().any(|w| !(w.is_finite() && *w > 0.0)) || windows.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParameter("windows must be positive and increasing".into()));
        }
        let period = self.slowest_period().unwrap_or(1.0);
        let mut sigma = Vec::with_capacity(windows.len());
        for &window in windows {
            let mut worst = 0.0f64;
            for b in 0..8 {
                let t = b as f64 * period / 8.0;
                worst = worst.max(self.window_deviation(t, window).sobolev_norm(gamma)?);
            }
            sigma.push(worst);
        }
        let m_gamma = sigma.iter().copied().fold(0.0, f64::max);
        Ok(AverageReport { windows: windows.to_vec(), sigma, gamma, m_gamma })
    }

    /// A rationally independent generating set of the term frequencies
    /// `ω_j·η` (original-time units). See [`frequency_basis`].
    pub fn frequency_basis(&self) -> Vec<f64> {
        let freqs: Vec<f64> = self.terms.iter().map(|t| t.omega * self.eta).collect();
        frequency_basis(&freqs)
    }
}

impl Forcing for ForcingSpec {
    fn at(&self, tau: f64) -> SpectralField {
        self.evaluate(tau)
    }

    fn fastest_period(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.omega).reduce(f64::max).map(|w| 2.0 * PI / w)
    }
}

/// Relative tolerance for rational-dependence detection.
pub const RATIONAL_TOL: f64 = 1e-9;
/// Largest denominator tried when matching a frequency ratio to `p/q`.
pub const MAX_DENOMINATOR: u64 = 64;
const MAX_RELATION_COEFF: i64 = 4;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `x ≈ p/q` with `q ≤ MAX_DENOMINATOR`.
fn rational_approx(x: f64) -> Option<(u64, u64)> {
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (x * q as f64).round();
        (p >= 1.0 && (p / q as f64 - x).abs() <= RATIONAL_TOL * x.max(1.0)).then(|| {
            let p = p as u64;
            let g = gcd(p, q);
            (p / g, q / g)
        })
    })
}

/// Reduces a set of positive frequencies to a generating set under integer
/// combinations.
///
/// Frequencies whose pairwise ratios are rationals `p/q` with `q ≤ 64`
/// (tolerance `1e-9`) collapse into one generator, their rational gcd; a
/// generator that is then a small integer combination (coefficients up to
/// ±4) of earlier generators is dropped. Output is sorted ascending.
pub fn frequency_basis(freqs: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = freqs.iter().copied().filter(|f| f.is_finite() && *f > 0.0).collect();
    sorted.sort_by(f64::total_cmp);

    // rationally dependent classes: (reference frequency, members as p/q of it)
    let mut classes: Vec<(f64, Vec<(u64, u64)>)> = Vec::new();
    'outer: for &f in &sorted {
        for (reference, members) in classes.iter_mut() {
            if let Some(pq) = rational_approx(f / *reference) {
                members.push(pq);
                continue 'outer;
            }
        }
        classes.push((f, vec![(1, 1)]));
    }

    let mut generators: Vec<f64> = classes
        .iter()
        .map(|(reference, members)| {
            let lcm = members.iter().fold(1u64, |acc, &(_, q)| acc / gcd(acc, q) * q);
            let numer = members.iter().fold(0u64, |acc, &(p, q)| gcd(acc, p * (lcm / q)));
            reference * numer as f64 / lcm as f64
        })
        .collect();
    generators.sort_by(f64::total_cmp);

    let mut basis: Vec<f64> = Vec::new();
    for g in generators {
        if !is_small_combination(g, &basis) {
            basis.push(g);
        }
    }
    basis
}

fn is_small_combination(target: f64, basis: &[f64]) -> bool {
    if basis.is_empty() || basis.len() > 4 {
        return false;
    }
    let span = (2 * MAX_RELATION_COEFF + 1) as usize;
    let total = span.pow(basis.len() as u32);
    (0..total).any(|mut code| {
        let mut sum = 0.0;
        for b in basis {
            let c = (code % span) as i64 - MAX_RELATION_COEFF;
            code /= span;
            sum += c as f64 * b;
        }
        (sum - target).abs() <= RATIONAL_TOL * target.max(1.0)
    })
}
