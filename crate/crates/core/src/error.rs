use thiserror::Error;

use crate::grid::Grid3;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: Grid3, right: Grid3 },

    #[error("sample count {got} does not match grid size {expected}")]
    SampleCount { expected: usize, got: usize },

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("vector potential is not transverse (relative divergence {0:e})")]
    NotTransverse(f64),

    #[error("invalid time step {0}")]
    InvalidTimeStep(f64),

    #[error("non-finite value in {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },

    #[error("trajectory needs at least 3 states, got {0}")]
    ShortTrajectory(usize),

    #[error("empty mode set: cutoff {cutoff} is below the smallest lattice wavevector {smallest}")]
    EmptyModeSet { cutoff: f64, smallest: f64 },

    #[error("invalid sector parameters: {0}")]
    InvalidSector(String),

    #[error("sector dimension {dimension} exceeds cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    #[error("unknown photon mode slot {0}")]
    UnknownMode(usize),

    #[error("vector length {got} does not match sector dimension {expected}")]
    VectorLength { expected: usize, got: usize },

    #[error("mode lattice inconsistent with electron orbitals: {0}")]
    LatticeMismatch(String),

    #[error("{0} electrons unsupported (only 1 or 2)")]
    UnsupportedElectronCount(usize),

    #[error("invalid eigensolver request: {0}")]
    InvalidEigenRequest(String),

    #[error("Lanczos did not converge within {max_iter} iterations (best residuals {residuals:?})")]
    NoConvergence { max_iter: usize, residuals: Vec<f64> },

    #[error("degenerate perturbation theory: |E_s - E_m| = {gap:e} with coupling {coupling:e} to state {state}")]
    Degenerate { state: usize, gap: f64, coupling: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
