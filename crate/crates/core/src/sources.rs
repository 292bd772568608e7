//! Charge and current densities of a single electron wave function, the
//! continuity residual, and the simultaneous gauge transformation.
//!
//! Minimal coupling is `(-iħ∇ - (e/c)A)`, the sign consistent with
//! E = -∇V - (1/c)∂A/∂t, Ampère's law with source `+(4π/c)j`, and the gauge
//! transformation implemented in [`gauge_transform`].

use num_complex::Complex64 as C64;

use crate::dynamics::schrodinger_rhs;
use crate::error::{Error, Result};
use crate::grid::{ComplexScalarField, RealScalarField, RealVectorField};
use crate::spectral::Spectral;

/// Floor applied to denominators of relative residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-300;

/// Physical constants in Gaussian units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub mass: f64,
    /// Electron charge, sign included.
    pub charge: f64,
    pub c: f64,
}

impl Default for Constants {
    /// Hartree atomic units with the electron charge -1 and c = 137.036.
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, charge: -1.0, c: 137.036 }
    }
}

impl Constants {
    pub fn new(hbar: f64, mass: f64, charge: f64, c: f64) -> Result<Self> {
        let k = Self { hbar, mass, charge, c };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("m", self.mass), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConstants(format!("{name} = {v} must be positive")));
            }
        }
        if !self.charge.is_finite() {
            return Err(Error::InvalidConstants(format!("e = {} must be finite", self.charge)));
        }
        Ok(())
    }

    /// e/c, the factor multiplying A in the covariant momentum.
    pub fn coupling(&self) -> f64 {
        self.charge / self.c
    }

    pub fn with_charge(mut self, charge: f64) -> Self {
        self.charge = charge;
        self
    }
}

/// ρ = e|ψ|².
pub fn charge_density(sp: &Spectral, psi: &ComplexScalarField, k: &Constants) -> Result<RealScalarField> {
    sp.grid().check_same(&psi.grid)?;
    let values = psi.values.iter().map(|z| k.charge * z.norm_sqr()).collect();
    Ok(RealScalarField { grid: psi.grid, values: sp.filter(values) })
}

/// j = (e/2m) ψ*(-iħ∇ - (e/c)A)ψ + c.c.
///   = (eħ/m) Im(ψ*∇ψ) - (e²/mc) A|ψ|².
pub fn current_density(
    sp: &Spectral,
    psi: &ComplexScalarField,
    a: &RealVectorField,
    k: &Constants,
) -> Result<RealVectorField> {
    psi.grid.check_same(&a.grid)?;
    let grad = sp.gradient_complex(psi)?;
    let para = k.charge * k.hbar / k.mass;
    let dia = k.charge * k.coupling() / k.mass;
    let components = [0, 1, 2].map(|c| {
        let v: Vec<f64> = psi
            .values
            .iter()
            .zip(&grad.components[c])
            .zip(&a.components[c])
            .map(|((p, g), av)| para * (p.conj() * g).im - dia * av * p.norm_sqr())
            .collect();
        sp.filter(v)
    });
    Ok(RealVectorField { grid: psi.grid, components })
}

/// Paramagnetic part (eħ/m) Im(ψ*∇ψ) of the current.
pub fn paramagnetic_current(sp: &Spectral, psi: &ComplexScalarField, k: &Constants) -> Result<RealVectorField> {
    let grad = sp.gradient_complex(psi)?;
    let para = k.charge * k.hbar / k.mass;
    let components = [0, 1, 2].map(|c| {
        psi.values.iter().zip(&grad.components[c]).map(|(p, g)| para * (p.conj() * g).im).collect()
    });
    Ok(RealVectorField { grid: psi.grid, components })
}

#[derive(Clone, Debug)]
pub struct ContinuityResidual {
    /// r = ∇·j + ∂ρ/∂t.
    pub field: RealScalarField,
    /// ‖r‖ / max(‖∇·j‖, floor).
    pub relative: f64,
}

/// Evaluates ∇·j + ∂ρ/∂t with ∂ρ/∂t = 2e Re(ψ* ∂ψ/∂t) and ∂ψ/∂t taken from
/// [`schrodinger_rhs`] with the same A and V.
pub fn continuity_residual(
    sp: &Spectral,
    psi: &ComplexScalarField,
    a: &RealVectorField,
    v: &RealScalarField,
    k: &Constants,
) -> Result<ContinuityResidual> {
    let dpsi = schrodinger_rhs(sp, psi, a, v, k)?;
    let j = current_density(sp, psi, a, k)?;
    let div_j = sp.divergence(&j)?;
    let mut r = div_j.clone();
    for ((ri, p), d) in r.values.iter_mut().zip(&psi.values).zip(&dpsi.values) {
        *ri += 2.0 * k.charge * (p.conj() * d).re;
    }
    let relative = r.norm() / div_j.norm().max(RESIDUAL_FLOOR);
    Ok(ContinuityResidual { field: r, relative })
}

#[derive(Clone, Debug)]
pub struct GaugeFields {
    pub v: RealScalarField,
    pub a: RealVectorField,
    pub psi: ComplexScalarField,
}

/// V' = V + χ̇/c, A' = A - ∇χ, ψ' = ψ·exp(-ieχ/(ħc)).
pub fn gauge_transform(
    sp: &Spectral,
    fields: &GaugeFields,
    chi: &RealScalarField,
    chi_dot: &RealScalarField,
    k: &Constants,
) -> Result<GaugeFields> {
    let g = fields.psi.grid;
    for other in [fields.v.grid, fields.a.grid, chi.grid, chi_dot.grid] {
        g.check_same(&other)?;
    }
    let mut v = fields.v.clone();
    v.add_scaled(1.0 / k.c, chi_dot)?;
    let mut a = fields.a.clone();
    a.add_scaled(-1.0, &sp.gradient(chi)?)?;
    let phase = -k.charge / (k.hbar * k.c);
    let psi_values = fields
        .psi
        .values
        .iter()
        .zip(&chi.values)
        .map(|(p, x)| p * C64::from_polar(1.0, phase * x))
        .collect();
    Ok(GaugeFields { v, a, psi: ComplexScalarField { grid: g, values: psi_values } })
}

/// E = -∇V - (1/c)∂A/∂t.
pub fn electric_field(sp: &Spectral, v: &RealScalarField, a_dot: &RealVectorField, k: &Constants) -> Result<RealVectorField> {
    let mut e = sp.gradient(v)?.scaled(-1.0);
    e.add_scaled(-1.0 / k.c, a_dot)?;
    Ok(e)
}
