//! Hamiltonian and Lagrangian densities of the coupled system.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dynamics::SemiclassicalState;
use crate::error::Result;
use crate::grid::{ComplexScalarField, ComplexVectorField, RealScalarField, RealVectorField};
use crate::sources::{charge_density, Constants};
use crate::spectral::Spectral;

/// The four terms of the Coulomb-gauge Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    /// ∫ 2πc² Π_⊥², i.e. (1/8π)∫E_⊥².
    pub electric: f64,
    /// (1/8π)∫|∇×A_⊥|².
    pub magnetic: f64,
    /// (1/2m)∫|(-iħ∇ - (e/c)A_⊥)ψ|².
    pub kinetic: f64,
    /// (1/2)∫ρV with V the periodic Coulomb potential of ρ.
    pub coulomb: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn field(&self) -> f64 {
        self.electric + self.magnetic
    }
}

/// (-iħ∂_a - qA_a)ψ for each axis.
fn covariant_momentum(
    sp: &Spectral,
    psi: &ComplexScalarField,
    a: &RealVectorField,
    k: &Constants,
) -> Result<ComplexVectorField> {
    let mut grad = sp.gradient_complex(psi)?;
    let q = k.coupling();
    for axis in 0..3 {
        for ((g, p), av) in grad.components[axis].iter_mut().zip(&psi.values).zip(&a.components[axis]) {
            *g = C64::new(0.0, -k.hbar) * *g - q * av * p;
        }
    }
    Ok(grad)
}

fn kinetic_density(sp: &Spectral, psi: &ComplexScalarField, a: &RealVectorField, k: &Constants) -> Result<Vec<f64>> {
    let pi = covariant_momentum(sp, psi, a, k)?;
    Ok((0..psi.values.len())
        .map(|i| pi.components.iter().map(|c| c[i].norm_sqr()).sum::<f64>() / (2.0 * k.mass))
        .collect())
}

pub fn total_energy(sp: &Spectral, state: &SemiclassicalState, k: &Constants) -> Result<EnergyBreakdown> {
    let dv = sp.grid().cell_volume();
    let electric = 2.0 * PI * k.c * k.c * state.pi_perp.norm_sqr();
    let magnetic = sp.curl(&state.a_perp)?.norm_sqr() / (8.0 * PI);
    let kinetic = kinetic_density(sp, &state.psi, &state.a_perp, k)?.iter().sum::<f64>() * dv;
    let rho = charge_density(sp, &state.psi, k)?;
    let v = sp.solve_coulomb(&rho)?;
    let coulomb = 0.5 * rho.inner(&v)?;
    Ok(EnergyBreakdown { electric, magnetic, kinetic, coulomb, total: electric + magnetic + kinetic + coulomb })
}

/// (1/8π)|∇V + (1/c)∂A/∂t|² - (1/8π)|∇×A|².
pub fn photon_lagrangian_density(
    sp: &Spectral,
    a: &RealVectorField,
    a_dot: &RealVectorField,
    v: &RealScalarField,
    k: &Constants,
) -> Result<RealScalarField> {
    let mut e = sp.gradient(v)?;
    e.add_scaled(1.0 / k.c, a_dot)?;
    let b = sp.curl(a)?;
    let e2 = e.magnitude_sqr();
    let b2 = b.magnitude_sqr();
    let values = e2.iter().zip(&b2).map(|(x, y)| (x - y) / (8.0 * PI)).collect();
    Ok(RealScalarField { grid: a.grid, values })
}

/// Free electron density -(ħ²/2m)|∇ψ|² - (iħ/2)(ψ̇*ψ - ψ*ψ̇).
pub fn electron_lagrangian_density(
    sp: &Spectral,
    psi: &ComplexScalarField,
    psi_dot: &ComplexScalarField,
    k: &Constants,
) -> Result<RealScalarField> {
    let zero = RealVectorField::zeros(psi.grid);
    let kin = kinetic_density(sp, psi, &zero, k)?;
    let values = kin
        .iter()
        .zip(&psi.values)
        .zip(&psi_dot.values)
        .map(|((t, p), d)| -t - k.hbar * (p.conj() * d).im)
        .collect();
    Ok(RealScalarField { grid: psi.grid, values })
}

/// Pointwise minimally coupled Lagrangian density:
/// L = L_ph - (1/2m)|(-iħ∇ - (e/c)A)ψ|² - ħ Im(ψ*ψ̇) - eV|ψ|².
pub fn lagrangian_density(
    sp: &Spectral,
    state: &SemiclassicalState,
    psi_dot: &ComplexScalarField,
    a_dot: &RealVectorField,
    v: &RealScalarField,
    k: &Constants,
) -> Result<RealScalarField> {
    let mut l = photon_lagrangian_density(sp, &state.a_perp, a_dot, v, k)?;
    let kin = kinetic_density(sp, &state.psi, &state.a_perp, k)?;
    for (i, li) in l.values.iter_mut().enumerate() {
        let p = state.psi.values[i];
        *li += -kin[i] - k.hbar * (p.conj() * psi_dot.values[i]).im - k.charge * v.values[i] * p.norm_sqr();
    }
    Ok(l)
}

/// ∫(-L) + ∫[Π_⊥·Ȧ_⊥ + Π_ψ ψ̇ + Π_ψ* ψ̇*], the Legendre transform evaluated
/// from the supplied rates. Π_ψ = δL/δψ̇ = (iħ/2)ψ*.
pub fn legendre_energy(
    sp: &Spectral,
    state: &SemiclassicalState,
    psi_dot: &ComplexScalarField,
    a_dot: &RealVectorField,
    v: &RealScalarField,
    k: &Constants,
) -> Result<f64> {
    let l = lagrangian_density(sp, state, psi_dot, a_dot, v, k)?;
    let field = state.pi_perp.inner(a_dot)?;
    let matter: f64 = state
        .psi
        .values
        .iter()
        .zip(&psi_dot.values)
        .map(|(p, d)| {
            let pi_psi = C64::new(0.0, k.hbar / 2.0) * p.conj();
            2.0 * (pi_psi * d).re
        })
        .sum::<f64>()
        * sp.grid().cell_volume();
    Ok(-l.integral() + field + matter)
}
