//! Linearization about a stationary averaged state and its spectrum.
//!
//! Sign convention: `L` is the operator in `h_τ + εLh = …`, so a mode with
//! `Re λ > 0` decays and a mode with `Re λ < 0` grows. The unstable count
//! is `N = #{Re λ < 0}` and the state is asymptotically stable iff `N = 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::model::{ModelParams, QgModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by increasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// Largest `a` with no eigenvalue in the strip `|Re λ| ≤ a`.
    pub gap_a: f64,
    /// `#{Re λ < 0}`.
    pub n_unstable: usize,
    /// Retained modes per axis.
    pub truncation: usize,
}

impl SpectrumReport {
    pub fn is_stable(&self) -> bool {
        self.n_unstable == 0
    }

    /// Eigenvalue with the smallest real part.
    pub fn slowest(&self) -> Option<Complex64> {
        self.eigenvalues.first().copied()
    }
}

pub fn max_truncation(model: &QgModel) -> usize {
    model.grid().dealias_x().min(model.grid().dealias_y())
}

/// Dense matrix of `L h = Ah + J(Δ⁻¹h, ω₀) + J(Δ⁻¹ω₀, h)` on the modes
/// `k, l ≤ truncation`, indexed `(k−1)·truncation + (l−1)`.
pub fn assemble_l(model: &QgModel, omega0: &SpectralField, truncation: usize) -> Result<DMatrix<f64>> {
    let max = max_truncation(model);
    if truncation == 0 || truncation > max {
        return Err(Error::TruncationTooLarge { truncation, max });
    }
    if omega0.grid() != model.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = *model.grid();
    let n = truncation * truncation;
    let mut m = DMatrix::zeros(n, n);
    for col in 0..n {
        let (k, l) = (col / truncation + 1, col % truncation + 1);
        let e = SpectralField::mode(grid, k, l, 1.0)?;
        let le = model.linearized(omega0, &e)?;
        for row in 0..n {
            let (kr, lr) = (row / truncation + 1, row % truncation + 1);
            m[(row, col)] = le.get(kr, lr);
        }
    }
    Ok(m)
}

/// Embeds a truncated coefficient vector into a full field.
pub fn field_from_truncated(model: &QgModel, truncation: usize, values: &[f64]) -> Result<SpectralField> {
    let grid = *model.grid();
    let mut modes = Vec::with_capacity(values.len());
    for (idx, v) in values.iter().enumerate() {
        modes.push((idx / truncation + 1, idx % truncation + 1, *v));
    }
    SpectralField::from_modes(grid, &modes)
}

/// Restricts a field to the modes `k, l ≤ truncation`.
pub fn truncated_vector(field: &SpectralField, truncation: usize) -> DVector<f64> {
    DVector::from_fn(truncation * truncation, |idx, _| field.get(idx / truncation + 1, idx % truncation + 1))
}

/// Full nonsymmetric eigendecomposition via the real Schur form.
pub fn spectrum(matrix: &DMatrix<f64>, truncation: usize) -> Result<SpectrumReport> {
    if !matrix.is_square() || matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let schur = Schur::try_new(matrix.clone(), f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
    let mut eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let n_unstable = eigenvalues.iter().filter(|z| z.re < 0.0).count();
    let gap_a = eigenvalues.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    let gap_a = if gap_a.is_finite() { gap_a } else { 0.0 };
    Ok(SpectrumReport { eigenvalues, gap_a, n_unstable, truncation })
}

/// Eigenvector of `matrix` for the eigenvalue closest to `lambda`, by
/// shifted inverse iteration; normalized to unit Euclidean norm.
pub fn eigenvector(matrix: &DMatrix<f64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = matrix.nrows();
    let scale = 1.0 + lambda.norm();
    let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        let v = Complex64::new(matrix[(i, j)], 0.0);
        if i == j {
            v - shift
        } else {
            v
        }
    });
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.7).sin(), 0.0));
    for _ in 0..4 {
        v = lu.solve(&v).ok_or(Error::EigenFailure)?;
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::EigenFailure);
        }
        v /= Complex64::new(norm, 0.0);
    }
    Ok(v)
}

/// `λ₀ = π‖f₀‖²/(2λ₁³|D|)`: `L + λ` is coercive for `λ > λ₀`.
pub fn lambda0(params: &ModelParams, f0: &SpectralField) -> Result<f64> {
    let lambda1 = params.spectral_gap_condition().lambda1;
    if lambda1 <= 0.0 {
        return Err(Error::GapConditionFails { lambda1 });
    }
    let n = f0.norm();
    Ok(PI * n * n / (2.0 * lambda1.powi(3) * params.grid().area()))
}

/// Smallness threshold `√(2|D|/π)·λ₁²` on `‖f₀‖`.
pub fn smallness_threshold(params: &ModelParams) -> f64 {
    let lambda1 = params.spectral_gap_condition().lambda1;
    (2.0 * params.grid().area() / PI).sqrt() * lambda1 * lambda1
}

/// Gap condition together with `‖f₀‖ < √(2|D|/π)·λ₁²`.
pub fn corollary_smallness(params: &ModelParams, f0: &SpectralField) -> bool {
    params.is_dissipative() && f0.norm() < smallness_threshold(params)
}
