use crate::dynamics::rhs::check_transverse;
use crate::error::Result;
use crate::grid::{ComplexScalarField, RealVectorField};
use crate::spectral::Spectral;

/// ψ, the transverse vector potential and its conjugate momentum
/// Π_⊥ = (1/4πc²)∂A_⊥/∂t, at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiclassicalState {
    pub psi: ComplexScalarField,
    pub a_perp: RealVectorField,
    pub pi_perp: RealVectorField,
    pub t: f64,
}

impl SemiclassicalState {
    /// Validates grids and transversality of both field components.
    pub fn new(
        sp: &Spectral,
        psi: ComplexScalarField,
        a_perp: RealVectorField,
        pi_perp: RealVectorField,
        t: f64,
    ) -> Result<Self> {
        let g = sp.grid();
        g.check_same(&psi.grid)?;
        g.check_same(&a_perp.grid)?;
        g.check_same(&pi_perp.grid)?;
        check_transverse(sp, &a_perp)?;
        check_transverse(sp, &pi_perp)?;
        Ok(Self { psi, a_perp, pi_perp, t })
    }

    pub fn vacuum(sp: &Spectral) -> Self {
        let g = *sp.grid();
        Self {
            psi: ComplexScalarField::zeros(g),
            a_perp: RealVectorField::zeros(g),
            pi_perp: RealVectorField::zeros(g),
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.psi.is_finite() && self.a_perp.is_finite() && self.pi_perp.is_finite() && self.t.is_finite()
    }
}
