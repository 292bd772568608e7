//! Objects built from a [`Config`]: grid, initial semiclassical state, mode
//! set and Fock sector.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use nrqed_core::dynamics::SemiclassicalState;
use nrqed_core::fock::{enumerate_sector, FockSector};
use nrqed_core::grid::{ComplexScalarField, RealVectorField};
use nrqed_core::modes::{build_modes, ModeSet};
use nrqed_core::spectral::Spectral;

use crate::config::Config;
use crate::CliError;

pub fn spectral(cfg: &Config) -> Result<Spectral, CliError> {
    Ok(Spectral::new(cfg.grid()?).with_dealiasing(cfg.grid.dealias))
}

pub fn mode_set(cfg: &Config) -> Result<ModeSet, CliError> {
    Ok(build_modes(cfg.grid.box_length, cfg.modes.q_cutoff)?)
}

pub fn sector(cfg: &Config, modes: &ModeSet) -> Result<FockSector, CliError> {
    Ok(enumerate_sector(modes, cfg.sector_params())?)
}

/// Normalized Gaussian packet at the box centre with the configured width and
/// mean wavevector, plus a free transverse field in which every mode of the
/// photon mode set carries amplitude `field_amplitude` in both polarizations,
/// phased so that the field starts as a superposition of travelling waves.
pub fn initial_state(cfg: &Config, sp: &Spectral) -> Result<SemiclassicalState, CliError> {
    let g = *sp.grid();
    let l = g.box_length();
    let c = cfg.constants()?.c;
    let modes = mode_set(cfg)?;
    let d = &cfg.dynamics;
    let sigma2 = d.packet_width * d.packet_width;
    let k0 = d.packet_momentum;
    let mut psi = ComplexScalarField::from_fn(g, |x| {
        let r2: f64 = (0..3).map(|i| (x[i] - 0.5 * l).powi(2)).sum();
        C64::from_polar((-r2 / (2.0 * sigma2)).exp(), k0[0] * x[0] + k0[1] * x[1] + k0[2] * x[2])
    });
    psi.normalize();

    // one representative per ±q pair (mode index i): cos for A, matching sin for Π
    let reps: Vec<_> = modes.modes().iter().enumerate().step_by(2).collect();
    let phase = |x: [f64; 3], i: usize, lam: usize| {
        let q = modes.modes()[i].q;
        q[0] * x[0] + q[1] * x[1] + q[2] * x[2] + 0.7 * i as f64 + 1.3 * lam as f64
    };
    let a0 = d.field_amplitude;
    let a = RealVectorField::from_fn(g, |x| {
        let mut v = [0.0; 3];
        for &(i, m) in &reps {
            for (lam, e) in m.polarizations.iter().enumerate() {
                let s = a0 * phase(x, i, lam).cos();
                (0..3).for_each(|i| v[i] += s * e[i]);
            }
        }
        v
    });
    let pi = RealVectorField::from_fn(g, |x| {
        let mut v = [0.0; 3];
        for &(i, m) in &reps {
            let w = c * m.magnitude();
            for (lam, e) in m.polarizations.iter().enumerate() {
                let s = a0 * w / (4.0 * PI * c * c) * phase(x, i, lam).sin();
                (0..3).for_each(|i| v[i] += s * e[i]);
            }
        }
        v
    });
    Ok(SemiclassicalState::new(sp, psi, a, pi, 0.0)?)
}
