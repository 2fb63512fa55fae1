//! Pseudo-spectral dynamics of the barotropic quasi-geostrophic vorticity
//! equation on a rectangle with Dirichlet walls,
//!
//! ```text
//! ω_t + Aω + J(Δ⁻¹ω, ω) = f(x, y, ηt),     A = −νΔ + r + β∂ₓΔ⁻¹,
//! ```
//!
//! together with the tools needed to study it under rapidly oscillating
//! forcing: averaged dynamics, the bounded oscillatory corrector, stationary
//! averaged states and the spectrum of their linearization, decay towards
//! the bounded solution, harmonic content of the response and attractor
//! semi-distances.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the companion `qg` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod attractor;
pub mod averaging;
pub mod basis;
pub mod error;
pub mod field;
pub mod forcing;
pub mod grid;
pub mod model;
pub mod parallel;
pub mod random;
pub mod response;
pub mod spectrum;
pub mod stability;
pub mod stationary;
pub mod stepper;

pub use basis::SineBasis;
pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use forcing::{Forcing, ForcingSpec, ForcingTerm};
pub use grid::Grid;
pub use model::{GapCondition, ModelParams, QgModel};
pub use parallel::{Executor, Serial};
pub use stepper::{Scheme, StepperConfig, Trajectory};
