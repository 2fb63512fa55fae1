//! Physical parameters and the operators of the vorticity equation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::SineBasis;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

/// Viscosity `ν`, Ekman friction `r`, Coriolis gradient `β` and the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    nu: f64,
    r: f64,
    beta: f64,
    grid: Grid,
}

/// Outcome of the dissipativity test `4νr > β²|D|²/π²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCondition {
    pub holds: bool,
    /// Coercivity constant `λ₁ = ν − β²|D|²/(4rπ²)` of `⟨Aw, w⟩ ≥ λ₁‖∇w‖²`.
    pub lambda1: f64,
}

impl ModelParams {
    pub fn new(nu: f64, r: f64, beta: f64, grid: Grid) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidParameter(format!("nu = {nu} must be positive")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be nonnegative")));
        }
        Ok(Self { nu, r, beta, grid })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Same physics on another grid.
    pub fn with_grid(&self, grid: Grid) -> Self {
        Self { grid, ..*self }
    }

    pub fn spectral_gap_condition(&self) -> GapCondition {
        let area = self.grid.area();
        let b2 = self.beta * self.beta * area * area / (PI * PI);
        GapCondition { holds: 4.0 * self.nu * self.r > b2, lambda1: self.nu - b2 / (4.0 * self.r) }
    }

    pub fn is_dissipative(&self) -> bool {
        self.spectral_gap_condition().holds
    }

    /// `λ₁` when the gap condition holds.
    pub fn require_gap(&self) -> Result<f64> {
        let gap = self.spectral_gap_condition();
        if gap.holds {
            Ok(gap.lambda1)
        } else {
            Err(Error::GapConditionFails { lambda1: gap.lambda1 })
        }
    }

    /// Guaranteed L² decay rate of `e^{−At}`: `λ₁·μ₁₁` by coercivity and
    /// the sharp Poincaré inequality.
    pub fn guaranteed_decay_rate(&self) -> Result<f64> {
        Ok(self.require_gap()? * self.grid.mu_min())
    }
}

/// The operators `A`, `J(Δ⁻¹·, ·)` and their combinations on one grid.
#[derive(Debug, Clone)]
pub struct QgModel {
    params: ModelParams,
    basis: SineBasis,
    /// `νμ_kl + r` per mode.
    diag: Vec<f64>,
    /// Galerkin matrix of `∂ₓ` in the x sine basis, row `m`, column `k`.
    ddx_galerkin: Vec<f64>,
}

impl QgModel {
    pub fn new(params: ModelParams) -> Self {
        let grid = params.grid;
        let diag = grid.modes().map(|(k, l, _)| params.nu * grid.mu(k, l) + params.r).collect();
        let nx = grid.nx();
        let mut ddx_galerkin = vec![0.0; nx * nx];
        // (2/lx)∫ (kπ/lx) cos(kπx/lx) sin(mπx/lx) dx = (kπ/lx)·4m/(π(m²−k²)) for m+k odd
        for m in 1..=nx {
            for k in 1..=nx {
                if (m + k) % 2 == 1 {
                    let (mf, kf) = (m as f64, k as f64);
                    ddx_galerkin[(m - 1) * nx + (k - 1)] = grid.wavenumber_x(k) * 4.0 * mf / (PI * (mf * mf - kf * kf));
                }
            }
        }
        Self { params, basis: SineBasis::new(grid), diag, ddx_galerkin }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.params.grid
    }

    pub fn basis(&self) -> &SineBasis {
        &self.basis
    }

    /// Diagonal part `νμ_kl + r` of `A`, indexed like the coefficients.
    pub fn dissipation(&self) -> &[f64] {
        &self.diag
    }

    fn check(&self, w: &SpectralField) -> Result<()> {
        if w.grid() == self.grid() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// L² projection of `∂ₓf` onto the sine basis.
    pub fn ddx_projected(&self, f: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        let (nx, ny) = (self.grid().nx(), self.grid().ny());
        let src = f.coeffs();
        let mut out = vec![0.0; nx * ny];
        for m in 0..nx {
            let dst = &mut out[m * ny..(m + 1) * ny];
            for k in 0..nx {
                let a = self.ddx_galerkin[m * nx + k];
                if a != 0.0 {
                    for (d, s) in dst.iter_mut().zip(&src[k * ny..(k + 1) * ny]) {
                        *d += a * s;
                    }
                }
            }
        }
        Ok(SpectralField::from_raw(*self.grid(), out))
    }

    /// `β∂ₓΔ⁻¹w`.
    pub fn beta_term(&self, w: &SpectralField) -> Result<SpectralField> {
        if self.params.beta == 0.0 {
            self.check(w)?;
            return Ok(SpectralField::zeros(*self.grid()));
        }
        Ok(self.ddx_projected(&w.inverse_laplacian())?.scaled(self.params.beta))
    }

    /// `Aw = −νΔw + rw + β∂ₓΔ⁻¹w`.
    pub fn apply_a(&self, w: &SpectralField) -> Result<SpectralField> {
        let mut out = self.beta_term(w)?;
        for ((o, c), d) in out.coeffs_mut().iter_mut().zip(w.coeffs()).zip(&self.diag) {
            *o += d * c;
        }
        Ok(out)
    }

    /// `J(Δ⁻¹w, w)`.
    pub fn advection(&self, w: &SpectralField) -> Result<SpectralField> {
        self.basis.jacobian(&w.inverse_laplacian(), w)
    }

    /// `ω_t = −Aω − J(Δ⁻¹ω, ω) + f`.
    pub fn rhs(&self, w: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
        self.check(f)?;
        let mut out = f.clone();
        out -= &self.apply_a(w)?;
        out -= &self.advection(w)?;
        Ok(out)
    }

    /// Stationary residual `Aω + J(Δ⁻¹ω, ω) − f₀`.
    pub fn residual(&self, w: &SpectralField, f0: &SpectralField) -> Result<SpectralField> {
        self.check(f0)?;
        let mut out = self.apply_a(w)?;
        out += &self.advection(w)?;
        out -= f0;
        Ok(out)
    }

    /// Fréchet derivative of the stationary residual at `w0` applied to `h`:
    /// `Ah + J(Δ⁻¹h, w0) + J(Δ⁻¹w0, h)`.
    pub fn linearized(&self, w0: &SpectralField, h: &SpectralField) -> Result<SpectralField> {
        let mut out = self.apply_a(h)?;
        out += &self.basis.jacobian(&h.inverse_laplacian(), w0)?;
        out += &self.basis.jacobian(&w0.inverse_laplacian(), h)?;
        Ok(out)
    }
}
