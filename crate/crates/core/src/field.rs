//! Scalar fields in coefficient space and on the collocation grid.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Sine-series coefficients of a field vanishing on the boundary,
/// `f = Σ c_kl sin(kπx/lx) sin(lπy/ly)`, stored `k` outer.
///
/// Arithmetic operators panic on grid mismatch, like `ndarray` does for
/// shapes; the fallible operations return [`Error::GridMismatch`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<f64>,
}

/// Values at the interior collocation points, stored `i` (x) outer.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

fn check_data(grid: &Grid, data: &[f64]) -> Result<()> {
    if data.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), found: data.len() });
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, coeffs: vec![0.0; grid.len()] }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<f64>) -> Result<Self> {
        check_data(&grid, &coeffs)?;
        Ok(Self { grid, coeffs })
    }

    /// A single basis function `amp·sin(kπx/lx) sin(lπy/ly)`.
    pub fn mode(grid: Grid, k: usize, l: usize, amp: f64) -> Result<Self> {
        grid.check_mode(k, l)?;
        let mut f = Self::zeros(grid);
        f.coeffs[grid.index(k, l)] = amp;
        Ok(f)
    }

    /// Sum of `(k, l, amplitude)` modes.
    pub fn from_modes(grid: Grid, modes: &[(usize, usize, f64)]) -> Result<Self> {
        let mut f = Self::zeros(grid);
        for &(k, l, amp) in modes {
            grid.check_mode(k, l)?;
            if !amp.is_finite() {
                return Err(Error::NonFinite);
            }
            f.coeffs[grid.index(k, l)] += amp;
        }
        Ok(f)
    }

    pub(crate) fn from_raw(grid: Grid, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.coeffs[self.grid.index(k, l)]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn map_modes(&self, mut scale: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = self.clone();
        for (k, l, idx) in self.grid.modes() {
            out.coeffs[idx] *= scale(k, l);
        }
        out
    }

    /// `Δf`: mode `(k, l)` is multiplied by `−μ_kl`.
    pub fn laplacian(&self) -> Self {
        let g = self.grid;
        self.map_modes(|k, l| -g.mu(k, l))
    }

    /// `Δ⁻¹f` with homogeneous Dirichlet data; every `μ_kl > 0`, so this is
    /// always defined.
    pub fn inverse_laplacian(&self) -> Self {
        let g = self.grid;
        self.map_modes(|k, l| -1.0 / g.mu(k, l))
    }

    /// `(−Δ)^s f` for any real `s`.
    pub fn laplacian_power(&self, s: f64) -> Self {
        let g = self.grid;
        self.map_modes(|k, l| g.mu(k, l).powf(s))
    }

    /// L² norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq_weighted(|_, _| 1.0).sqrt()
    }

    /// `‖(−Δ)^s f‖`, the Dirichlet-Laplacian proxy for the fractional
    /// power norms of the dynamics operator. `s = 1/2` gives `‖∇f‖`,
    /// `s = 1` gives `‖Δf‖`.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::UnsupportedIndex(s));
        }
        let g = self.grid;
        Ok(self.norm_sq_weighted(|k, l| g.mu(k, l).powf(2.0 * s)).sqrt())
    }

    /// `‖∇f‖ = ‖f‖_{1/2}`.
    pub fn gradient_norm(&self) -> f64 {
        let g = self.grid;
        self.norm_sq_weighted(|k, l| g.mu(k, l)).sqrt()
    }

    fn norm_sq_weighted(&self, weight: impl Fn(usize, usize) -> f64) -> f64 {
        let sum: f64 = self.grid.modes().map(|(k, l, idx)| weight(k, l) * self.coeffs[idx] * self.coeffs[idx]).sum();
        sum * self.grid.mode_weight()
    }

    /// L² inner product `∫_D f g`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(dot(&self.coeffs, &other.coeffs) * self.grid.mode_weight())
    }

    /// `∫_D f dxdy`, exact for the truncated series.
    pub fn integral(&self) -> f64 {
        let g = self.grid;
        let odd = |k: usize, len: f64| if k % 2 == 1 { 2.0 * len / (k as f64 * core::f64::consts::PI) } else { 0.0 };
        g.modes().map(|(k, l, idx)| self.coeffs[idx] * odd(k, g.lx()) * odd(l, g.ly())).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Keeps modes `k ≤ kmax`, `l ≤ lmax`.
    pub fn truncated(&self, kmax: usize, lmax: usize) -> Self {
        self.map_modes(|k, l| if k <= kmax && l <= lmax { 1.0 } else { 0.0 })
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(self.grid, x.grid, "grid mismatch");
        for (y, x) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * x;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<&SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: &SpectralField) -> SpectralField {
        rhs.scaled(self)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_data(&grid, &values)?;
        Ok(Self { grid, values })
    }

    /// Samples `f(x_i, y_j)` at the interior collocation points.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 1..=grid.nx() {
            for j in 1..=grid.ny() {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self::from_values(grid, values)
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at collocation point `(i, j)`, 1-based.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(i - 1) * self.grid.ny() + (j - 1)]
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn grid() -> Grid {
        Grid::square_pi(8).unwrap()
    }

    #[test]
    fn laplacian_eigenvalues() {
        let g = grid();
        let f = SpectralField::mode(g, 1, 1, 1.0).unwrap();
        assert!((f.laplacian().get(1, 1) + 2.0).abs() < 1e-14);
        let f = SpectralField::mode(g, 2, 3, 1.0).unwrap();
        assert!((f.laplacian().get(2, 3) + 13.0).abs() < 1e-13);
        assert!((f.inverse_laplacian().get(2, 3) + 1.0 / 13.0).abs() < 1e-15);
        assert_eq!(SpectralField::zeros(g).inverse_laplacian(), SpectralField::zeros(g));
    }

    #[test]
    fn norms_of_fundamental_mode() {
        let f = SpectralField::mode(grid(), 1, 1, 1.0).unwrap();
        assert!((f.norm() - PI / 2.0).abs() < 1e-14);
        assert!((f.sobolev_norm(0.5).unwrap() - 2f64.sqrt() * PI / 2.0).abs() < 1e-14);
        assert!((f.sobolev_norm(1.0).unwrap() - PI).abs() < 1e-14);
        assert!(matches!(f.sobolev_norm(1.5), Err(Error::UnsupportedIndex(_))));
        assert!(f.sobolev_norm(-1.0).is_ok());
    }

    #[test]
    fn inner_product_basics() {
        let g = grid();
        let a = SpectralField::mode(g, 1, 1, 1.0).unwrap();
        let b = SpectralField::mode(g, 2, 1, 1.0).unwrap();
        assert_eq!(a.inner(&b).unwrap(), 0.0);
        assert!((a.inner(&a).unwrap() - a.norm() * a.norm()).abs() < 1e-14);
        let other = SpectralField::zeros(Grid::square_pi(10).unwrap());
        assert_eq!(a.inner(&other), Err(Error::GridMismatch));
    }

    #[test]
    fn integral_of_fundamental_mode() {
        // ∫ sin x sin y over (0,π)² = 4
        let f = SpectralField::mode(grid(), 1, 1, 1.0).unwrap();
        assert!((f.integral() - 4.0).abs() < 1e-14);
        let f = SpectralField::mode(grid(), 2, 1, 1.0).unwrap();
        assert_eq!(f.integral(), 0.0);
    }

    #[test]
    fn rejects_bad_data() {
        let g = grid();
        assert!(matches!(SpectralField::from_coeffs(g, vec![0.0; 3]), Err(Error::ShapeMismatch { .. })));
        let mut v = vec![0.0; g.len()];
        v[5] = f64::INFINITY;
        assert_eq!(SpectralField::from_coeffs(g, v), Err(Error::NonFinite));
        assert!(SpectralField::mode(g, 9, 1, 1.0).is_err());
    }
}
