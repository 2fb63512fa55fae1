use nalgebra::DVector;
use num_complex::Complex64;
use qg_core::random::band_limited;
use qg_core::spectrum::{assemble_l, eigenvector, field_from_truncated, spectrum, truncated_vector};
use qg_core::stationary::solve_stationary;
use qg_core::{Error, Grid, ModelParams, QgModel, SpectralField};

fn demo_model(n: usize) -> QgModel {
    QgModel::new(ModelParams::new(1.0, 1.0, 0.1, Grid::square_pi(n).unwrap()).unwrap())
}

fn demo_forcing(m: &QgModel) -> SpectralField {
    SpectralField::mode(*m.grid(), 1, 1, 0.1).unwrap()
}

/// `Aω + J(Δ⁻¹ω, ω) − f₀` assembled from the basis directly, bypassing the
/// model's residual routine.
fn independent_residual(m: &QgModel, omega: &SpectralField, f0: &SpectralField) -> f64 {
    let adv = m.basis().jacobian(&omega.inverse_laplacian(), omega).unwrap();
    let mut r = m.apply_a(omega).unwrap();
    r += &adv;
    r -= f0;
    r.norm()
}

#[test]
fn zero_forcing_has_zero_state() {
    let m = demo_model(16);
    let s = solve_stationary(&m, &SpectralField::zeros(*m.grid()), None, 1e-11, 10).unwrap();
    assert!(s.newton_iters <= 1);
    assert_eq!(s.omega0.max_abs(), 0.0);
}

#[test]
fn manufactured_state_is_recovered() {
    let m = demo_model(32);
    let g = *m.grid();
    for omega in [SpectralField::mode(g, 1, 1, 0.05).unwrap(), band_limited(g, 8).scaled(0.05)] {
        let f0 = &m.apply_a(&omega).unwrap() + &m.advection(&omega).unwrap();
        let s = solve_stationary(&m, &f0, None, 1e-13, 20).unwrap();
        assert!(s.omega0.max_abs_diff(&omega) < 1e-10, "{}", s.omega0.max_abs_diff(&omega));
    }
}

#[test]
fn demo_state_converges_quickly_from_any_guess() {
    let m = demo_model(32);
    let f0 = demo_forcing(&m);
    let a = solve_stationary(&m, &f0, None, 1e-11, 6).unwrap();
    assert!(a.newton_iters <= 6);
    assert!(a.residual_norm < 1e-11);
    let guess = SpectralField::mode(*m.grid(), 2, 2, 0.01).unwrap();
    let b = solve_stationary(&m, &f0, Some(&guess), 1e-11, 6).unwrap();
    assert!(a.omega0.max_abs_diff(&b.omega0) < 1e-9);
    let check = independent_residual(&m, &a.omega0, &f0);
    assert!((check - a.residual_norm).abs() < 1e-12);
}

#[test]
fn stationary_errors() {
    let m = demo_model(16);
    let big = SpectralField::mode(*m.grid(), 1, 1, 50.0).unwrap();
    assert!(matches!(solve_stationary(&m, &big, None, 1e-14, 1), Err(Error::NewtonDiverged { .. })));
    let bad = QgModel::new(ModelParams::new(1.0, 1.0, 1.0, *m.grid()).unwrap());
    assert!(matches!(solve_stationary(&bad, &demo_forcing(&bad), None, 1e-11, 6), Err(Error::GapConditionFails { .. })));
    let other = SpectralField::zeros(Grid::square_pi(8).unwrap());
    assert!(matches!(solve_stationary(&m, &other, None, 1e-11, 6), Err(Error::GridMismatch)));
}

#[test]
fn linearization_at_rest_is_a() {
    let m = demo_model(16);
    let g = *m.grid();
    let t = 8;
    let mat = assemble_l(&m, &SpectralField::zeros(g), t).unwrap();
    for col in 0..t * t {
        let e = field_from_truncated(&m, t, DVector::from_fn(t * t, |i, _| if i == col { 1.0 } else { 0.0 }).as_slice()).unwrap();
        let ae = truncated_vector(&m.apply_a(&e).unwrap(), t);
        assert!((mat.column(col) - ae).amax() < 1e-15);
    }
    // (1.16): Re λ ≥ λ₁μ₁₁ on the truncated spectrum
    let report = spectrum(&mat, t).unwrap();
    let bound = m.params().guaranteed_decay_rate().unwrap();
    assert!(report.eigenvalues.iter().all(|z| z.re >= bound));
    assert_eq!(report.n_unstable, 0);
}

#[test]
fn matrix_agrees_with_matrix_free_application() {
    let m = demo_model(32);
    let s = solve_stationary(&m, &demo_forcing(&m), None, 1e-11, 6).unwrap();
    let t = 16;
    let mat = assemble_l(&m, &s.omega0, t).unwrap();
    for seed in 0..3 {
        let h = band_limited(*m.grid(), seed).truncated(t, t);
        let free = truncated_vector(&m.linearized(&s.omega0, &h).unwrap(), t);
        let dense = &mat * truncated_vector(&h, t);
        assert!((free - dense).amax() < 1e-12);
    }
}

#[test]
fn linearization_matches_directional_differences() {
    let m = demo_model(32);
    let f0 = demo_forcing(&m);
    let s = solve_stationary(&m, &f0, None, 1e-11, 6).unwrap();
    let t = 16;
    let mat = assemble_l(&m, &s.omega0, t).unwrap();
    let e = band_limited(*m.grid(), 77).truncated(t, t);
    let le = &mat * truncated_vector(&e, t);
    let base = truncated_vector(&m.residual(&s.omega0, &f0).unwrap(), t);
    let errors: Vec<f64> = [1e-4, 1e-5]
        .iter()
        .map(|h| {
            let mut shifted = s.omega0.clone();
            shifted.axpy(*h, &e);
            let fd = (truncated_vector(&m.residual(&shifted, &f0).unwrap(), t) - &base) / *h;
            (fd - &le).norm()
        })
        .collect();
    let ratio = errors[0] / errors[1];
    assert!((5.0..=20.0).contains(&ratio), "{errors:?}");
}

#[test]
fn truncation_must_stay_in_band() {
    let m = demo_model(32);
    let z = SpectralField::zeros(*m.grid());
    assert!(assemble_l(&m, &z, 21).is_ok());
    assert!(matches!(assemble_l(&m, &z, 22), Err(Error::TruncationTooLarge { truncation: 22, max: 21 })));
}

#[test]
fn demo_state_is_stable_and_resolved() {
    // truncation 24 needs a band of at least 24 modes
    let m = demo_model(48);
    let s = solve_stationary(&m, &demo_forcing(&m), None, 1e-11, 6).unwrap();
    let reports: Vec<_> = [16, 24]
        .iter()
        .map(|t| {
            let mat = assemble_l(&m, &s.omega0, *t).unwrap();
            spectrum(&mat, *t).unwrap()
        })
        .collect();
    for r in &reports {
        assert_eq!(r.n_unstable, 0);
        assert_eq!(r.eigenvalues.len(), r.truncation * r.truncation);
        assert!(r.gap_a > 0.0);
        assert!(r.eigenvalues.windows(2).all(|w| w[0].re <= w[1].re));
    }
    for i in 0..5 {
        let (a, b) = (reports[0].eigenvalues[i], reports[1].eigenvalues[i]);
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn eigenvectors_satisfy_the_eigen_equation() {
    let m = demo_model(32);
    let s = solve_stationary(&m, &demo_forcing(&m), None, 1e-11, 6).unwrap();
    let mat = assemble_l(&m, &s.omega0, 10).unwrap();
    let report = spectrum(&mat, 10).unwrap();
    let cm = mat.map(|x| Complex64::new(x, 0.0));
    for lambda in report.eigenvalues.iter().take(5) {
        let v = eigenvector(&mat, *lambda).unwrap();
        assert!((&cm * &v - &v * *lambda).norm() < 1e-8);
    }
}
