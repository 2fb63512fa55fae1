use std::f64::consts::PI;

use qg_core::attractor::{attractor_distance, averaged_self_distance, semi_distance, AttractorConfig, SampleWindow};
use qg_core::averaging::nonincreasing_within;
use qg_core::response::{analyze_response, candidate_frequencies, response_frequencies, CONTROL_FRACTION};
use qg_core::spectrum::{assemble_l, eigenvector, field_from_truncated, spectrum, SpectrumReport};
use qg_core::stability::{decay_experiment, track_bounded_solution, TrackingConfig, DISTANCE_FLOOR};
use qg_core::stationary::solve_stationary;
use qg_core::{Error, ForcingSpec, ForcingTerm, Grid, ModelParams, QgModel, Scheme, Serial, SpectralField, StepperConfig};

struct Demo {
    model: QgModel,
    spec: ForcingSpec,
    omega0: SpectralField,
    spectrum: SpectrumReport,
}

fn demo(n: usize) -> Demo {
    let g = Grid::square_pi(n).unwrap();
    let model = QgModel::new(ModelParams::new(1.0, 1.0, 0.1, g).unwrap());
    let term = ForcingTerm { amplitude: SpectralField::mode(g, 2, 1, 0.2).unwrap(), omega: 1.0, phase: 0.0 };
    let spec = ForcingSpec::new(SpectralField::mode(g, 1, 1, 0.1).unwrap(), vec![term], 1.0).unwrap();
    let omega0 = solve_stationary(&model, spec.mean(), None, 1e-12, 10).unwrap().omega0;
    let t = 12.min(g.dealias_x());
    let spectrum = spectrum(&assemble_l(&model, &omega0, t).unwrap(), t).unwrap();
    Demo { model, spec, omega0, spectrum }
}

fn stepper() -> StepperConfig {
    StepperConfig::resolving(2.0 * PI, Scheme::EtdRk2, 32).unwrap()
}

#[test]
fn steady_forcing_tracks_the_stationary_state() {
    let d = demo(16);
    let spec = d.spec.averaged();
    let cfg = TrackingConfig::new(0.25, 10.0, stepper());
    let b = track_bounded_solution(&d.model, &spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    assert!(b.sup_distance < 1e-9, "{}", b.sup_distance);
}

#[test]
fn bounded_solution_approaches_the_stationary_state_as_epsilon_shrinks() {
    let d = demo(32);
    let sups: Vec<f64> = [0.125, 0.03125]
        .iter()
        .map(|eps| {
            let cfg = TrackingConfig::new(*eps, 4.0 * PI, stepper());
            track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap().sup_distance
        })
        .collect();
    assert!(sups[1] < sups[0], "{sups:?}");
}

#[test]
fn bounded_solution_is_periodic() {
    let d = demo(16);
    let period = d.spec.slowest_period().unwrap();
    let cfg = TrackingConfig::new(0.25, 2.0 * period, stepper());
    let b = track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    let states = b.trajectory.states();
    let per = 32;
    assert_eq!(states.len(), 2 * per + 1);
    for i in 0..=per {
        assert!((&states[i + per] - &states[i]).gradient_norm() < 1e-7);
    }
}

#[test]
fn unstable_spectra_are_refused() {
    let d = demo(8);
    let unstable = SpectrumReport { n_unstable: 1, ..d.spectrum.clone() };
    let cfg = TrackingConfig::new(0.25, 1.0, stepper());
    assert!(matches!(track_bounded_solution(&d.model, &d.spec, &d.omega0, &unstable, &cfg), Err(Error::UnstableModes(1))));
}

#[test]
fn zero_perturbation_sits_at_the_floor() {
    let d = demo(16);
    let cfg = TrackingConfig::new(0.25, 1.0, stepper());
    let b = track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    let r = decay_experiment(&d.model, &d.spec, &b, &SpectralField::zeros(*d.model.grid()), &d.spectrum, 20.0, 1).unwrap();
    assert!(r.distance.iter().all(|x| *x == DISTANCE_FLOOR));
    assert_eq!(r.fitted_rate, f64::INFINITY);
}

#[test]
fn demo_perturbation_decays() {
    let d = demo(32);
    let eps = 0.25;
    let cfg = TrackingConfig::new(eps, 1.0, stepper());
    let b = track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    let pert = SpectralField::mode(*d.model.grid(), 2, 2, 1e-3).unwrap();
    let horizon = 40.0 / (eps * d.spectrum.gap_a);
    let r = decay_experiment(&d.model, &d.spec, &b, &pert, &d.spectrum, horizon, 1).unwrap();
    assert!(r.fitted_rate > 0.0);
    assert!(r.fitted_rate >= 0.5 * r.reference_rate, "{} vs {}", r.fitted_rate, r.reference_rate);
    assert!(r.monotone_at_period_boundaries(d.spec.slowest_period().unwrap()));
    assert!(r.log_distance.iter().zip(&r.distance).all(|(l, x)| (l - x.ln()).abs() < 1e-15));
}

#[test]
fn slowest_eigenvector_decays_at_the_linear_rate() {
    let d = demo(32);
    let spec = d.spec.averaged();
    let t = d.spectrum.truncation;
    let mat = assemble_l(&d.model, &d.omega0, t).unwrap();
    let lambda = d.spectrum.slowest().unwrap();
    let v = eigenvector(&mat, lambda).unwrap();
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let shape = field_from_truncated(&d.model, t, &re).unwrap();
    let pert = shape.scaled(1e-7 / shape.gradient_norm());
    let eps = 1.0;
    let step = StepperConfig::new(0.01, Scheme::EtdRk2, 32).unwrap();
    let b = track_bounded_solution(&d.model, &spec, &d.omega0, &d.spectrum, &TrackingConfig::new(eps, 1.0, step)).unwrap();
    let r = decay_experiment(&d.model, &spec, &b, &pert, &d.spectrum, 3.0, 1).unwrap();
    let expected = eps * lambda.re;
    assert!((r.fitted_rate - expected).abs() <= 0.2 * expected, "{} vs {expected}", r.fitted_rate);
}

#[test]
fn growing_distance_is_reported() {
    let d = demo(16);
    let cfg = TrackingConfig::new(0.25, 1.0, stepper());
    let b = track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    // a huge perturbation drives the nonlinearity far from the linear regime
    let pert = SpectralField::mode(*d.model.grid(), 1, 2, 400.0).unwrap();
    match decay_experiment(&d.model, &d.spec, &b, &pert, &d.spectrum, 20.0, 1) {
        Err(Error::NoDecay { .. }) | Err(Error::BlowUp { .. }) => {}
        Ok(r) => assert!(r.fitted_rate > 0.0),
        Err(e) => panic!("{e:?}"),
    }
}

#[test]
fn steady_response_has_only_the_mean() {
    let d = demo(16);
    let spec = d.spec.averaged();
    // the lattice must span whole periods of every probed frequency
    let horizon = 50.0 * 2.0 * PI;
    let b = track_bounded_solution(&d.model, &spec, &d.omega0, &d.spectrum, &TrackingConfig::new(1.0, horizon, stepper())).unwrap();
    let probe = SpectralField::mode(*d.model.grid(), 1, 1, 1.0).unwrap();
    let mags = response_frequencies(&b.trajectory, &probe, &[0.0, 1.0, 2.5]).unwrap();
    assert!(mags[0].1 > 0.0);
    assert!(mags[1].1 < 1e-6 * mags[0].1 && mags[2].1 < 1e-6 * mags[0].1, "{mags:?}");
}

#[test]
fn periodic_response_lives_on_the_forcing_harmonics() {
    let d = demo(16);
    let eps = 0.25;
    let period = d.spec.slowest_period().unwrap();
    let cfg = TrackingConfig::new(eps, 50.0 * period, stepper());
    let b = track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    let basis = d.spec.with_eta(1.0 / eps).unwrap().frequency_basis();
    assert_eq!(basis, vec![4.0]);
    let probe = SpectralField::mode(*d.model.grid(), 2, 1, 1.0).unwrap();
    let report = analyze_response(&b.trajectory, &probe, &basis).unwrap();
    assert!(report.control_ratio() < CONTROL_FRACTION, "{report:?}");
    assert!(!report.controls.is_empty());
    // the largest peaks sit at 0 and at the forcing frequency
    let mut peaks = report.candidates.clone();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    let top: Vec<f64> = peaks.iter().take(2).map(|p| p.0).collect();
    assert!(top.contains(&4.0), "{peaks:?}");
    assert!(top.contains(&0.0) || peaks[0].0 == 4.0, "{peaks:?}");
    assert_eq!(candidate_frequencies(&basis, 3), vec![0.0, 4.0, 8.0, 12.0]);
}

#[test]
fn short_records_are_refused() {
    let d = demo(8);
    let cfg = TrackingConfig::new(0.25, 10.0, stepper());
    let b = track_bounded_solution(&d.model, &d.spec, &d.omega0, &d.spectrum, &cfg).unwrap();
    let probe = SpectralField::mode(*d.model.grid(), 1, 1, 1.0).unwrap();
    assert!(matches!(analyze_response(&b.trajectory, &probe, &[4.0]), Err(Error::TrajectoryTooShort { .. })));
}

fn attractor_config(n: usize, etas: Vec<f64>, members: usize) -> AttractorConfig {
    let d = demo(n);
    AttractorConfig {
        params: *d.model.params(),
        spec: d.spec,
        etas,
        n_initial: members,
        window: SampleWindow { transient: 10.0, span: 1.0, samples: 16 },
        stepper: stepper(),
        seed: 2024,
    }
}

#[test]
fn attractor_distance_shrinks_with_eta() {
    let cfg = attractor_config(16, vec![4.0, 16.0, 64.0], 4);
    let records = attractor_distance(&cfg, &Serial).unwrap();
    let dist: Vec<f64> = records.iter().map(|r| r.dist).collect();
    assert!(dist[2] < dist[0], "{dist:?}");
    assert!(nonincreasing_within(&dist, 0.15), "{dist:?}");
    assert!(records.iter().all(|r| r.n_samples == 4 * 16));
    assert!(averaged_self_distance(&cfg, &Serial).unwrap() < 1e-6);
}

#[test]
fn steady_forcing_has_no_attractor_gap() {
    let mut cfg = attractor_config(16, vec![4.0, 16.0], 2);
    cfg.spec = cfg.spec.averaged();
    let records = attractor_distance(&cfg, &Serial).unwrap();
    assert!(records.iter().all(|r| r.dist < 1e-6), "{records:?}");
}

#[test]
fn semi_distance_of_a_set_to_itself_is_zero() {
    let g = Grid::square_pi(8).unwrap();
    let cloud: Vec<SpectralField> = (0..5).map(|s| qg_core::random::initial_state(g, s, 0.5)).collect();
    assert_eq!(semi_distance(&cloud, &cloud), 0.0);
    assert!(semi_distance(&cloud, &cloud[..1]) > 0.0);
}
