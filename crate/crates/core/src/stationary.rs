//! Stationary states of the averaged equation, `Aω₀ + J(Δ⁻¹ω₀, ω₀) = f₀`,
//! by inexact Newton with matrix-free GMRES.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::{dot, SpectralField};
use crate::model::QgModel;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub omega0: SpectralField,
    /// L² norm of `Aω₀ + J(Δ⁻¹ω₀, ω₀) − f₀`.
    pub residual_norm: f64,
    pub newton_iters: usize,
}

/// Relative tolerance of each inner linear solve.
pub const LINEAR_RTOL: f64 = 1e-3;
const GMRES_RESTART: usize = 40;
const GMRES_MAX_RESTARTS: usize = 20;

/// Restarted right-preconditioned GMRES for `Ax = b` with a diagonal
/// preconditioner `x = M⁻¹y`. Returns the solution and the achieved
/// relative residual.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    inv_precond: &[f64],
    rtol: f64,
    restart: usize,
    max_restarts: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0.0));
    }
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(inv_precond).map(|(a, m)| a * m).collect() };
    for _ in 0..max_restarts {
        let ax = apply(&x)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = dot(&r, &r).sqrt();
        let relative = beta / bnorm;
        if relative <= rtol {
            return Ok((x, relative));
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut used = 0;
        for j in 0..restart {
            let mut w = apply(&precond(&basis[j]))?;
            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                col[i] = hij;
                for (w, v) in w.iter_mut().zip(v) {
                    *w -= hij * v;
                }
            }
            let wnorm = dot(&w, &w).sqrt();
            col[j + 1] = wnorm;
            for i in 0..j {
                let (a, b) = (col[i], col[i + 1]);
                col[i] = cs[i] * a + sn[i] * b;
                col[i + 1] = -sn[i] * a + cs[i] * b;
            }
            let (a, b) = (col[j], col[j + 1]);
            let rho = a.hypot(b);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
            cs.push(c);
            sn.push(s);
            col[j] = rho;
            col[j + 1] = 0.0;
            g.push(-s * g[j]);
            g[j] *= c;
            hess.push(col);
            used = j + 1;
            if g[j + 1].abs() / bnorm <= rtol || wnorm == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wnorm).collect());
        }
        // back substitution on the triangular factor
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= hess[k][i] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        let mut dy = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (d, v) in dy.iter_mut().zip(v) {
                *d += yi * v;
            }
        }
        for (x, d) in x.iter_mut().zip(precond(&dy)) {
            *x += d;
        }
    }
    let ax = apply(&x)?;
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let relative = dot(&r, &r).sqrt() / bnorm;
    if relative <= rtol {
        Ok((x, relative))
    } else {
        Err(Error::LinearSolveStagnation { relative })
    }
}

/// Newton iteration on `F(ω) = Aω + J(Δ⁻¹ω, ω) − f₀` from `initial`
/// (zero when `None`). Each step solves `L(ω)δ = −F(ω)` to relative
/// accuracy [`LINEAR_RTOL`], preconditioned by the diagonal of `A`.
pub fn solve_stationary(
    model: &QgModel,
    f0: &SpectralField,
    initial: Option<&SpectralField>,
    tol: f64,
    max_iters: usize,
) -> Result<StationaryState> {
    model.params().require_gap()?;
    let grid = *model.grid();
    if f0.grid() != &grid || initial.is_some_and(|w| w.grid() != &grid) {
        return Err(Error::GridMismatch);
    }
    let inv_precond: Vec<f64> = model.dissipation().iter().map(|d| 1.0 / d).collect();
    let mut omega = initial.cloned().unwrap_or_else(|| SpectralField::zeros(grid));
    let mut residual = model.residual(&omega, f0)?;
    let mut rnorm = residual.norm();
    let mut iters = 0;
    while rnorm >= tol {
        if iters == max_iters {
            return Err(Error::NewtonDiverged { iters, residual: rnorm });
        }
        let rhs: Vec<f64> = residual.coeffs().iter().map(|v| -v).collect();
        let base = omega.clone();
        let apply = |x: &[f64]| -> Result<Vec<f64>> {
            let h = SpectralField::from_raw(grid, x.to_vec());
            Ok(model.linearized(&base, &h)?.into_coeffs())
        };
        let (delta, _) = gmres(apply, &rhs, &inv_precond, LINEAR_RTOL, GMRES_RESTART, GMRES_MAX_RESTARTS)?;
        let delta = SpectralField::from_raw(grid, delta);

        // backtrack if the full step increases the residual
        let mut step = 1.0;
        loop {
            let mut trial = base.clone();
            trial.axpy(step, &delta);
            let r = model.residual(&trial, f0)?;
            let n = r.norm();
            if n < rnorm || step < 1e-3 {
                omega = trial;
                residual = r;
                rnorm = n;
                break;
            }
            step *= 0.5;
        }
        iters += 1;
        if !rnorm.is_finite() {
            return Err(Error::NewtonDiverged { iters, residual: rnorm });
        }
    }
    Ok(StationaryState { omega0: omega, residual_norm: rnorm, newton_iters: iters })
}
