//! Rectangular domain `(0, lx) × (0, ly)` with a sine basis of `nx × ny` modes.

use alloc::format;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Mode counts and side lengths of the rectangle.
///
/// Modes are indexed `k = 1..=nx`, `l = 1..=ny`; the matching collocation
/// points are the interior nodes `x_i = i·lx/(nx+1)`, `y_j = j·ly/(ny+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("{name} = {n} must be even and at least 4")));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("{name} = {l} must be positive")));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// `n × n` modes on `(0, π)²`.
    pub fn square_pi(n: usize) -> Result<Self> {
        Self::new(n, n, PI, PI)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    /// Number of coefficients (equivalently, collocation points).
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|D| = lx·ly`.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Squared L² norm of a unit-amplitude basis function, `|D|/4`.
    pub fn mode_weight(&self) -> f64 {
        0.25 * self.area()
    }

    pub fn wavenumber_x(&self, k: usize) -> f64 {
        k as f64 * PI / self.lx
    }

    pub fn wavenumber_y(&self, l: usize) -> f64 {
        l as f64 * PI / self.ly
    }

    /// Eigenvalue of `−Δ` for mode `(k, l)`.
    pub fn mu(&self, k: usize, l: usize) -> f64 {
        let a = self.wavenumber_x(k);
        let b = self.wavenumber_y(l);
        a * a + b * b
    }

    /// First Dirichlet eigenvalue, the sharp Poincaré constant.
    pub fn mu_min(&self) -> f64 {
        self.mu(1, 1)
    }

    /// Largest mode index per axis kept by the 2/3 rule: quadratic products
    /// of modes `≤ K` alias only onto modes `> K`.
    pub fn dealias_x(&self) -> usize {
        (2 * (self.nx + 1) - 1) / 3
    }

    pub fn dealias_y(&self) -> usize {
        (2 * (self.ny + 1) - 1) / 3
    }

    /// Flat offset of mode `(k, l)`, 1-based, `k` outer.
    pub fn index(&self, k: usize, l: usize) -> usize {
        debug_assert!((1..=self.nx).contains(&k) && (1..=self.ny).contains(&l));
        (k - 1) * self.ny + (l - 1)
    }

    pub fn check_mode(&self, k: usize, l: usize) -> Result<()> {
        if (1..=self.nx).contains(&k) && (1..=self.ny).contains(&l) {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange { k, l })
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.lx / (self.nx + 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.ly / (self.ny + 1) as f64
    }

    /// Iterates `(k, l, flat index)` over every mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let ny = self.ny;
        (0..self.len()).map(move |idx| (idx / ny + 1, idx % ny + 1, idx))
    }
}
