//! Harmonic content of a sampled response `t ↦ ⟨ω(t), probe⟩`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::stepper::Trajectory;

/// Minimum record length, in periods of the slowest nonzero frequency.
pub const MIN_PERIODS: f64 = 50.0;
/// Contract: controls stay below this fraction of the largest candidate.
pub const CONTROL_FRACTION: f64 = 0.05;

const GOLDEN: f64 = 1.618_033_988_749_895;

/// `|(2/T)∫ s(t) e^{−iλt} dt|` for each frequency `λ` (original time
/// `t = ετ`), with `s(t) = ⟨ω(t), probe⟩` integrated by the trapezoid rule
/// over the whole record.
pub fn response_frequencies(trajectory: &Trajectory, probe: &SpectralField, freqs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if trajectory.len() < 2 {
        return Err(Error::TrajectoryTooShort { needed: 2.0, available: trajectory.len() as f64 });
    }
    let span = trajectory.epsilon() * (trajectory.times()[trajectory.len() - 1] - trajectory.times()[0]);
    if let Some(slowest) = freqs.iter().copied().filter(|f| *f > 0.0).reduce(f64::min) {
        let needed = MIN_PERIODS * 2.0 * PI / slowest;
        if span < needed * (1.0 - 1e-9) {
            return Err(Error::TrajectoryTooShort { needed, available: span });
        }
    }
    magnitudes(trajectory, probe, freqs)
}

fn magnitudes(trajectory: &Trajectory, probe: &SpectralField, freqs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let eps = trajectory.epsilon();
    let times: Vec<f64> = trajectory.times().iter().map(|tau| eps * tau).collect();
    let signal = trajectory.states().iter().map(|w| w.inner(probe)).collect::<Result<Vec<f64>>>()?;
    let span = times[times.len() - 1] - times[0];
    Ok(freqs
        .iter()
        .map(|&lambda| {
            let (mut re, mut im) = (0.0, 0.0);
            for i in 0..times.len() - 1 {
                let dt = times[i + 1] - times[i];
                for (t, s) in [(times[i], signal[i]), (times[i + 1], signal[i + 1])] {
                    re += 0.5 * dt * s * (lambda * t).cos();
                    im -= 0.5 * dt * s * (lambda * t).sin();
                }
            }
            (lambda, 2.0 / span * re.hypot(im))
        })
        .collect())
}

/// Nonnegative integer combinations `Σ n_i b_i` with `Σ|n_i| ≤ order`,
/// sorted, duplicates merged. Always contains 0.
pub fn candidate_frequencies(basis: &[f64], order: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0];
    let mut frontier = alloc::vec![0.0];
    for _ in 0..order {
        let mut next = Vec::new();
        for f in &frontier {
            for b in basis {
                next.push(f + b);
                next.push(f - b);
            }
        }
        out.extend(next.iter().copied().filter(|f| *f > 1e-12));
        frontier = next;
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    out
}

/// Golden-ratio multiples `b/φ`, `bφ`, `bφ²` of each basis frequency that
/// stay at least `separation` away from every candidate.
pub fn control_frequencies(basis: &[f64], candidates: &[f64], separation: f64) -> Vec<f64> {
    let mut out: Vec<f64> = basis
        .iter()
        .flat_map(|b| [b / GOLDEN, b * GOLDEN, b * GOLDEN * GOLDEN])
        .filter(|f| candidates.iter().all(|c| (c - f).abs() >= separation))
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseReport {
    pub candidates: Vec<(f64, f64)>,
    pub controls: Vec<(f64, f64)>,
}

impl ResponseReport {
    /// Largest control magnitude over largest candidate magnitude.
    pub fn control_ratio(&self) -> f64 {
        let top = |v: &[(f64, f64)]| v.iter().map(|p| p.1).fold(0.0, f64::max);
        let cand = top(&self.candidates);
        if cand == 0.0 {
            return if top(&self.controls) == 0.0 { 0.0 } else { f64::INFINITY };
        }
        top(&self.controls) / cand
    }

    pub fn holds(&self) -> bool {
        self.control_ratio() < CONTROL_FRACTION
    }
}

/// Candidate (order-3 combinations of `basis`) and control magnitudes of
/// the response.
pub fn analyze_response(trajectory: &Trajectory, probe: &SpectralField, basis: &[f64]) -> Result<ResponseReport> {
    if trajectory.len() < 2 {
        return Err(Error::TrajectoryTooShort { needed: 2.0, available: trajectory.len() as f64 });
    }
    let candidates = candidate_frequencies(basis, 3);
    let span = trajectory.epsilon() * (trajectory.times()[trajectory.len() - 1] - trajectory.times()[0]);
    let controls = control_frequencies(basis, &candidates, 10.0 * 2.0 * PI / span.max(f64::MIN_POSITIVE));
    let slowest = basis.iter().copied().reduce(f64::min);
    let mut all = candidates.clone();
    all.extend(&controls);
    if let Some(s) = slowest {
        // the record must cover the slowest candidate; controls only need
        // to stay separated from the candidates
        let needed = MIN_PERIODS * 2.0 * PI / s;
        if span < needed * (1.0 - 1e-9) {
            return Err(Error::TrajectoryTooShort { needed, available: span });
        }
    }
    let mags = magnitudes(trajectory, probe, &all)?;
    let (cand, ctrl) = mags.split_at(candidates.len());
    Ok(ResponseReport { candidates: cand.to_vec(), controls: ctrl.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::model::ModelParams;
    use alloc::vec;

    fn synthetic(signal: impl Fn(f64) -> f64, t_end: f64, n: usize) -> (Trajectory, SpectralField) {
        let g = Grid::square_pi(4).unwrap();
        let p = ModelParams::new(1.0, 1.0, 0.0, g).unwrap();
        let probe = SpectralField::mode(g, 1, 1, 1.0).unwrap();
        let unit = probe.inner(&probe).unwrap();
        let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        let states = times.iter().map(|t| probe.scaled(signal(*t) / unit)).collect();
        (Trajectory::new(times, states, p, 1.0).unwrap(), probe)
    }

    #[test]
    fn recovers_cosine_amplitudes() {
        let t_end = 50.0 * 2.0 * PI;
        let (traj, probe) = synthetic(|t| 1.0 + 0.3 * (2.0 * t).cos(), t_end, 50 * 64);
        let mags = response_frequencies(&traj, &probe, &[0.0, 1.0, 2.0]).unwrap();
        assert!((mags[0].1 - 2.0).abs() < 1e-12);
        assert!(mags[1].1 < 1e-12);
        assert!((mags[2].1 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn short_records_are_rejected() {
        let (traj, probe) = synthetic(|t| t.cos(), 10.0, 100);
        assert!(matches!(response_frequencies(&traj, &probe, &[1.0]), Err(Error::TrajectoryTooShort { .. })));
    }

    #[test]
    fn candidate_combinations() {
        assert_eq!(candidate_frequencies(&[1.0], 3), vec![0.0, 1.0, 2.0, 3.0]);
        let s = 2f64.sqrt();
        let c = candidate_frequencies(&[1.0, s], 2);
        for f in [0.0, 1.0, s, 2.0, 2.0 * s, 1.0 + s, s - 1.0] {
            assert!(c.iter().any(|x| (x - f).abs() < 1e-12), "missing {f}");
        }
    }

    #[test]
    fn controls_avoid_candidates() {
        let cand = candidate_frequencies(&[1.0], 3);
        let ctrl = control_frequencies(&[1.0], &cand, 0.1);
        assert_eq!(ctrl.len(), 3);
        assert!(ctrl.iter().all(|f| cand.iter().all(|c| (c - f).abs() >= 0.1)));
        assert!(control_frequencies(&[1.0], &cand, 0.5).is_empty());
    }
}
