//! Seeded random fields.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::field::SpectralField;
use crate::grid::Grid;

/// Gaussian coefficients scaled by `μ_kl^{−decay}` on modes `k ≤ kmax`,
/// `l ≤ lmax`, from a fixed seed.
pub fn gaussian_field(grid: Grid, seed: u64, decay: f64, kmax: usize, lmax: usize) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = grid
        .modes()
        .map(|(k, l, _)| {
            let z: f64 = StandardNormal.sample(&mut rng);
            if k <= kmax && l <= lmax {
                z * grid.mu(k, l).powf(-decay)
            } else {
                0.0
            }
        })
        .collect();
    SpectralField::from_raw(grid, coeffs)
}

/// Random field inside the dealiased band with coefficients decaying like
/// `μ^{−1}`, the workhorse for identity checks.
pub fn band_limited(grid: Grid, seed: u64) -> SpectralField {
    gaussian_field(grid, seed, 1.0, grid.dealias_x(), grid.dealias_y())
}

/// Initial state for attractor sampling: `μ^{−2}` decay on every mode,
/// rescaled to `‖·‖_{1/2} = radius`.
pub fn initial_state(grid: Grid, seed: u64, radius: f64) -> SpectralField {
    let f = gaussian_field(grid, seed, 2.0, grid.nx(), grid.ny());
    let n = f.gradient_norm();
    f.scaled(radius / n)
}
