use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("shape mismatch: expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite value in field data")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sobolev index {0} outside the supported range [-1, 1]")]
    UnsupportedIndex(f64),
    #[error("mode ({k}, {l}) outside the grid")]
    ModeOutOfRange { k: usize, l: usize },
    #[error("solution blew up; last finite state at time {time}")]
    BlowUp { time: f64 },
    #[error("time step {dt} under-resolves the forcing: at most {max_dt} allowed")]
    UnderResolved { dt: f64, max_dt: f64 },
    #[error("spectral gap condition 4*nu*r > beta^2*|D|^2/pi^2 fails (lambda1 = {lambda1})")]
    GapConditionFails { lambda1: f64 },
    #[error("state left the dissipative bound: norm {norm} exceeds {bound} at time {time}")]
    NotDissipative { time: f64, norm: f64, bound: f64 },
    #[error("newton iteration did not converge in {iters} iterations (residual {residual:e})")]
    NewtonDiverged { iters: usize, residual: f64 },
    #[error("linear solve stagnated at relative residual {relative:e}")]
    LinearSolveStagnation { relative: f64 },
    #[error("truncation {truncation} exceeds the dealiased band {max}")]
    TruncationTooLarge { truncation: usize, max: usize },
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
    #[error("linearization has {0} unstable modes")]
    UnstableModes(usize),
    #[error("perturbation does not decay: distance grew from {initial:e} to {reached:e}")]
    NoDecay { initial: f64, reached: f64 },
    #[error("trajectory too short: {available} available, at least {needed} needed")]
    TrajectoryTooShort { needed: f64, available: f64 },
}
