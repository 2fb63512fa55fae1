use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use qg_core::forcing::frequency_basis;
use qg_core::{ForcingSpec, ForcingTerm, Grid, SpectralField};

fn grid() -> Grid {
    Grid::square_pi(8).unwrap()
}

fn term(k: usize, l: usize, amp: f64, omega: f64, phase: f64) -> ForcingTerm {
    ForcingTerm { amplitude: SpectralField::mode(grid(), k, l, amp).unwrap(), omega, phase }
}

fn mean() -> SpectralField {
    SpectralField::mode(grid(), 1, 1, 0.1).unwrap()
}

fn demo(eta: f64) -> ForcingSpec {
    ForcingSpec::new(mean(), vec![term(2, 1, 0.2, 1.0, 0.0)], eta).unwrap()
}

fn quasi_periodic() -> ForcingSpec {
    ForcingSpec::new(mean(), vec![term(2, 1, 0.2, 1.0, 0.0), term(1, 2, 0.05, SQRT_2, 0.3)], 1.0).unwrap()
}

#[test]
fn evaluation_examples() {
    let steady = ForcingSpec::steady(mean());
    for tau in [0.0, 1.7, -40.0] {
        assert_eq!(steady.evaluate(tau), mean());
    }
    let spec = demo(4.0);
    assert!(spec.evaluate(0.0).max_abs_diff(&(&mean() + &SpectralField::mode(grid(), 2, 1, 0.2).unwrap())) < 1e-15);
}

#[test]
fn single_term_is_periodic() {
    let eta = 8.0;
    let spec = demo(eta);
    // period 2π/ω in fast time, i.e. 2π/(ωη) in original time t = τ/η
    for tau in [0.0, 0.3, 5.0, 123.4] {
        assert!(spec.evaluate(tau + 2.0 * PI).max_abs_diff(&spec.evaluate(tau)) < 1e-13);
        let t = tau / eta;
        let shifted = eta * (t + 2.0 * PI / eta);
        assert!(spec.evaluate(shifted).max_abs_diff(&spec.evaluate(tau)) < 1e-13);
    }
    assert_eq!(spec.slowest_period(), Some(2.0 * PI));
}

#[test]
fn average_is_the_mean_for_every_eta() {
    for eta in [1.0, 4.0, 1000.0] {
        assert_eq!(demo(eta).average(), mean());
    }
    assert_eq!(quasi_periodic().average(), mean());
}

#[test]
fn long_quadrature_reproduces_the_mean() {
    let spec = quasi_periodic();
    let period = spec.slowest_period().unwrap();
    let span = 1e4 * period;
    // composite Simpson, 32 panels per slowest period
    let n = 2 * 16 * 10_000;
    let h = span / n as f64;
    let mut acc = SpectralField::zeros(grid());
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.axpy(w * h / 3.0, &spec.evaluate(i as f64 * h));
    }
    let avg = acc.scaled(1.0 / span);
    assert!((&avg - &mean()).norm() < 1e-3);
}

#[test]
fn steady_average_error_vanishes() {
    let r = ForcingSpec::steady(mean()).time_average_error(0.5, &[1.0, 10.0]).unwrap();
    assert_eq!(r.sigma, vec![0.0, 0.0]);
    assert_eq!(r.m_gamma, 0.0);
}

#[test]
fn cosine_window_bound() {
    let spec = demo(1.0);
    let amp = &spec.terms()[0].amplitude;
    for gamma in [-0.5, 0.0, 0.5, 1.0] {
        let r = spec.time_average_error(gamma, &[10.0, 100.0, 1000.0]).unwrap();
        for (t, s) in r.windows.iter().zip(&r.sigma) {
            assert!(*s <= 2.0 * amp.sobolev_norm(gamma).unwrap() / t * (1.0 + 1e-12), "γ={gamma} T={t}");
            assert!(*s > 0.0);
        }
    }
    assert!(spec.time_average_error(1.5, &[1.0]).is_err());
    assert!(spec.time_average_error(0.0, &[2.0, 1.0]).is_err());
}

/// `(1/T)∫_t^{t+T} f dτ − f₀` by Gauss–Legendre quadrature.
fn quadrature_deviation(spec: &ForcingSpec, t: f64, window: f64) -> SpectralField {
    let nodes = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
    let weights = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
    let panels = (window * 8.0).ceil() as usize;
    let h = window / panels as f64;
    let mut acc = SpectralField::zeros(grid());
    for p in 0..panels {
        let mid = t + (p as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(weights) {
            acc.axpy(w * h / 2.0, &spec.evaluate(mid + x * h / 2.0));
        }
    }
    &acc.scaled(1.0 / window) - spec.mean()
}

#[test]
fn closed_form_window_matches_quadrature() {
    let spec = quasi_periodic();
    for (t, window) in [(0.0, 3.0), (1.3, 17.5), (40.0, 100.0)] {
        let closed = spec.window_deviation(t, window);
        assert!(closed.max_abs_diff(&quadrature_deviation(&spec, t, window)) < 1e-10);
    }
}

#[test]
fn doubling_the_window_halves_sigma() {
    // windows 2^k·2π/3 keep |sin(T/2)| fixed for the unit-frequency term
    let spec = quasi_periodic();
    let windows: Vec<f64> = (3..9).map(|k| f64::powi(2.0, k) * 2.0 * PI / 3.0).collect();
    let r = spec.time_average_error(0.0, &windows).unwrap();
    for pair in r.sigma.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((ratio - 2.0).abs() <= 0.4, "{:?}", r.sigma);
    }
}

#[test]
fn sigma_is_nonincreasing_up_to_factor_two() {
    // along doubling sequences of windows; σ itself touches zero whenever
    // a window spans whole periods, so arbitrary pairs carry no ripple bound
    let spec = quasi_periodic();
    for t0 in [2.5, 5.0, 7.3, 11.0] {
        let windows: Vec<f64> = (0..7).map(|k| t0 * f64::powi(2.0, k)).collect();
        let r = spec.time_average_error(0.5, &windows).unwrap();
        for pair in r.sigma.windows(2) {
            assert!(pair[1] <= 2.0 * pair[0], "T0={t0}: {:?}", r.sigma);
        }
        let max = r.sigma.iter().cloned().fold(0.0, f64::max);
        assert_eq!(r.m_gamma, max);
    }
}

#[test]
fn frequency_basis_examples() {
    assert_eq!(frequency_basis(&[1.0, 2.0, 3.0]), vec![1.0]);
    let irr = frequency_basis(&[1.0, SQRT_2]);
    assert_eq!(irr.len(), 2);
    assert!((irr[0] - 1.0).abs() < 1e-12 && (irr[1] - SQRT_2).abs() < 1e-12);
    let half = frequency_basis(&[1.0, 1.5]);
    assert_eq!(half.len(), 1);
    assert!((half[0] - 0.5).abs() < 1e-12);
    assert!(frequency_basis(&[]).is_empty());
    // scaled by η in original time
    let spec = ForcingSpec::new(mean(), vec![term(2, 1, 0.1, 1.0, 0.0), term(1, 2, 0.1, 3.0, 0.0)], 4.0).unwrap();
    assert_eq!(spec.frequency_basis(), vec![4.0]);
}

/// Whether `f` is an integer combination of `basis` with small coefficients.
fn is_combination(f: f64, basis: &[f64]) -> bool {
    fn search(f: f64, basis: &[f64]) -> bool {
        match basis.split_first() {
            None => f.abs() < 1e-7,
            Some((b, rest)) => (-64i32..=64).any(|n| search(f - n as f64 * b, rest)),
        }
    }
    search(f, basis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_frequency_is_generated(nums in prop::collection::vec(1u32..12, 1..4), den in 1u32..6, with_irrational in any::<bool>()) {
        let mut freqs: Vec<f64> = nums.iter().map(|n| *n as f64 / den as f64).collect();
        if with_irrational {
            freqs.push(SQRT_2 * 3.0);
        }
        let basis = frequency_basis(&freqs);
        prop_assert!(!basis.is_empty() && basis.len() <= 2);
        for f in &freqs {
            prop_assert!(is_combination(*f, &basis), "{} not generated by {:?}", f, basis);
        }
    }

    #[test]
    fn average_ignores_eta(eta in 1.0f64..1e6) {
        prop_assert_eq!(quasi_periodic().with_eta(eta).unwrap().average(), mean());
    }
}

#[test]
fn spec_validation() {
    assert!(ForcingSpec::new(mean(), vec![], 0.5).is_err());
    assert!(ForcingSpec::new(mean(), vec![term(1, 1, 1.0, 0.0, 0.0)], 1.0).is_err());
    let other = SpectralField::zeros(Grid::square_pi(16).unwrap());
    assert!(ForcingSpec::new(other, vec![term(1, 1, 1.0, 1.0, 0.0)], 1.0).is_err());
}
