//! Discrete sine transform pair, collocated derivatives and the dealiased
//! pseudo-spectral Jacobian.
//!
//! The transforms are dense matrix products along each axis. At the grid
//! sizes this crate targets (≤ 128 per axis) that costs `O(n³)` per
//! transform and keeps the crate free of FFT dependencies.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::Grid;

/// Precomputed synthesis tables for one grid.
#[derive(Debug, Clone)]
pub struct SineBasis {
    grid: Grid,
    /// `sin(kπ i/(nx+1))`, row `i`, column `k` (0-based both).
    sin_x: Vec<f64>,
    sin_y: Vec<f64>,
    /// `(kπ/lx) cos(kπ i/(nx+1))`.
    dcos_x: Vec<f64>,
    dcos_y: Vec<f64>,
}

fn tables(n: usize, len: f64) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (n + 1) as f64;
    let mut s = vec![0.0; n * n];
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            // reduce the integer phase first so large products stay accurate
            let phase = ((i + 1) * (k + 1)) % (2 * (n + 1));
            let arg = phase as f64 * h;
            s[i * n + k] = arg.sin();
            c[i * n + k] = (k + 1) as f64 * PI / len * arg.cos();
        }
    }
    (s, c)
}

impl SineBasis {
    pub fn new(grid: Grid) -> Self {
        let (sin_x, dcos_x) = tables(grid.nx(), grid.lx());
        let (sin_y, dcos_y) = tables(grid.ny(), grid.ly());
        Self { grid, sin_x, sin_y, dcos_x, dcos_y }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if *grid == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Evaluates `Σ_{k<kb, l<lb} mx[i,k] my[j,l] c[k,l]` at every collocation point.
    fn synthesize(&self, coeffs: &[f64], mx: &[f64], my: &[f64], kb: usize, lb: usize) -> Vec<f64> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        // tmp[k, j] = Σ_l my[j, l] c[k, l]
        let mut tmp = vec![0.0; kb * ny];
        for k in 0..kb {
            let row = &coeffs[k * ny..k * ny + lb];
            for j in 0..ny {
                let m = &my[j * ny..j * ny + lb];
                tmp[k * ny + j] = m.iter().zip(row).map(|(a, b)| a * b).sum();
            }
        }
        let mut out = vec![0.0; nx * ny];
        for i in 0..nx {
            let dst = &mut out[i * ny..(i + 1) * ny];
            for k in 0..kb {
                let a = mx[i * nx + k];
                for (d, t) in dst.iter_mut().zip(&tmp[k * ny..(k + 1) * ny]) {
                    *d += a * t;
                }
            }
        }
        out
    }

    /// Forward transform restricted to `k ≤ kb`, `l ≤ lb`; higher modes are zero.
    fn analyze(&self, values: &[f64], kb: usize, lb: usize) -> Vec<f64> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let norm = 4.0 / ((nx + 1) * (ny + 1)) as f64;
        // tmp[k, j] = Σ_i S[i, k] v[i, j]
        let mut tmp = vec![0.0; kb * ny];
        for i in 0..nx {
            let src = &values[i * ny..(i + 1) * ny];
            for k in 0..kb {
                let a = self.sin_x[i * nx + k];
                for (t, v) in tmp[k * ny..(k + 1) * ny].iter_mut().zip(src) {
                    *t += a * v;
                }
            }
        }
        let mut out = vec![0.0; nx * ny];
        for k in 0..kb {
            let row = &tmp[k * ny..(k + 1) * ny];
            for l in 0..lb {
                // sin table is symmetric in (j, l)
                let s = &self.sin_y[l * ny..(l + 1) * ny];
                out[k * ny + l] = norm * s.iter().zip(row).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        out
    }

    pub fn to_physical(&self, f: &SpectralField) -> Result<PhysicalField> {
        self.check(f.grid())?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        Ok(PhysicalField::from_raw(self.grid, self.synthesize(f.coeffs(), &self.sin_x, &self.sin_y, nx, ny)))
    }

    pub fn to_spectral(&self, p: &PhysicalField) -> Result<SpectralField> {
        self.check(p.grid())?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        Ok(SpectralField::from_raw(self.grid, self.analyze(p.values(), nx, ny)))
    }

    /// `∂f/∂x` of the truncated series at the collocation points.
    pub fn ddx(&self, f: &SpectralField) -> Result<PhysicalField> {
        self.check(f.grid())?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        Ok(PhysicalField::from_raw(self.grid, self.synthesize(f.coeffs(), &self.dcos_x, &self.sin_y, nx, ny)))
    }

    pub fn ddy(&self, f: &SpectralField) -> Result<PhysicalField> {
        self.check(f.grid())?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        Ok(PhysicalField::from_raw(self.grid, self.synthesize(f.coeffs(), &self.sin_x, &self.dcos_y, nx, ny)))
    }

    /// `J(f, g) = f_x g_y − f_y g_x`, dealiased by the 2/3 rule.
    ///
    /// Inputs are truncated to the band `k ≤ Kx`, `l ≤ Ky` before the
    /// product and the result is projected back onto the same band. For
    /// band-limited inputs the product is alias-free, so the result is the
    /// exact L² projection of the continuous Jacobian; in particular
    /// `⟨J(f, g), g⟩ = 0` and `⟨J(f, g), h⟩ = −⟨J(f, h), g⟩` hold to roundoff
    /// for arbitrary inputs.
    pub fn jacobian(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.check(f.grid())?;
        self.check(g.grid())?;
        let (kb, lb) = (self.grid.dealias_x(), self.grid.dealias_y());
        let fx = self.synthesize(f.coeffs(), &self.dcos_x, &self.sin_y, kb, lb);
        let fy = self.synthesize(f.coeffs(), &self.sin_x, &self.dcos_y, kb, lb);
        let gx = self.synthesize(g.coeffs(), &self.dcos_x, &self.sin_y, kb, lb);
        let gy = self.synthesize(g.coeffs(), &self.sin_x, &self.dcos_y, kb, lb);
        let prod: Vec<f64> = fx.iter().zip(&gy).zip(fy.iter().zip(&gx)).map(|((a, b), (c, d))| a * b - c * d).collect();
        Ok(SpectralField::from_raw(self.grid, self.analyze(&prod, kb, lb)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_synthesis() {
        let g = Grid::square_pi(8).unwrap();
        let b = SineBasis::new(g);
        let p = b.to_physical(&SpectralField::mode(g, 1, 1, 1.0).unwrap()).unwrap();
        let expect = PhysicalField::from_fn(g, |x, y| x.sin() * y.sin()).unwrap();
        assert!(p.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn zero_round_trip() {
        let g = Grid::new(6, 8, 1.0, 2.0).unwrap();
        let b = SineBasis::new(g);
        let z = SpectralField::zeros(g);
        let p = b.to_physical(&z).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert_eq!(b.to_spectral(&p).unwrap(), z);
    }

    #[test]
    fn derivative_of_fundamental_mode() {
        let g = Grid::square_pi(8).unwrap();
        let b = SineBasis::new(g);
        let f = SpectralField::mode(g, 1, 1, 1.0).unwrap();
        let fx = b.ddx(&f).unwrap();
        let expect = PhysicalField::from_fn(g, |x, y| x.cos() * y.sin()).unwrap();
        assert!(fx.max_abs_diff(&expect) < 1e-15);
        let fy = b.ddy(&f).unwrap();
        let expect = PhysicalField::from_fn(g, |x, y| x.sin() * y.cos()).unwrap();
        assert!(fy.max_abs_diff(&expect) < 1e-15);
        assert_eq!(b.ddx(&SpectralField::zeros(g)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn jacobian_of_field_with_itself_vanishes() {
        let g = Grid::square_pi(16).unwrap();
        let b = SineBasis::new(g);
        let f = SpectralField::from_modes(g, &[(1, 2, 0.3), (3, 1, -0.7), (4, 4, 0.1)]).unwrap();
        assert!(b.jacobian(&f, &f).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let b = SineBasis::new(Grid::square_pi(8).unwrap());
        let f = SpectralField::zeros(Grid::square_pi(10).unwrap());
        assert_eq!(b.to_physical(&f), Err(Error::GridMismatch));
        assert_eq!(b.jacobian(&f, &f), Err(Error::GridMismatch));
    }
}
