//! Non-relativistic QED in Coulomb gauge.
//!
//! Two halves share the periodic box and unit conventions:
//!
//! * a pseudospectral solver for one classical Schrödinger field coupled to
//!   the transverse Maxwell field ([`grid`], [`spectral`], [`sources`],
//!   [`dynamics`]);
//! * the second-quantized Hamiltonian on a truncated plane-wave ⊗ photon-Fock
//!   basis and its lowest eigenvalues ([`modes`], [`fock`], [`hamiltonian`],
//!   [`eigen`]).

pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod fock;
pub mod grid;
pub mod hamiltonian;
pub mod modes;
pub mod random;
pub mod sources;
pub mod spectral;

pub use error::{Error, Result};
