//! Coupled Maxwell-Schrödinger dynamics in Coulomb gauge.

mod energy;
mod integrator;
mod residual;
mod rhs;
mod state;

pub use energy::{
    electron_lagrangian_density, legendre_energy, lagrangian_density, photon_lagrangian_density,
    total_energy, EnergyBreakdown,
};
pub use integrator::StrangIntegrator;
pub use residual::{euler_lagrange_residual, ElResidual};
pub use rhs::{
    apply_matter_hamiltonian, check_transverse, maxwell_transverse_rhs, relative_divergence,
    schrodinger_rhs, FieldRates, TRANSVERSE_TOLERANCE,
};
pub use state::SemiclassicalState;
