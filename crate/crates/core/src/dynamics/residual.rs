//! Field-equation residuals along a discrete trajectory, using central time
//! differences.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dynamics::{apply_matter_hamiltonian, SemiclassicalState};
use crate::error::{Error, Result};
use crate::sources::{charge_density, current_density, Constants, RESIDUAL_FLOOR};
use crate::spectral::Spectral;

/// Relative residuals at one interior trajectory time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElResidual {
    pub t: f64,
    /// Transverse Ampère law ∇×∇×A - (4π/c)P_⊥j + (1/c²)∂²A/∂t².
    pub ampere: f64,
    /// Gauss law ∇·E - 4πρ, with the unresolved part of ρ (mean and Nyquist
    /// corners) carried by the neutralizing background.
    pub gauss: f64,
    /// iħ∂ψ/∂t - hψ.
    pub schrodinger: f64,
}

/// Residuals at every interior state `1..len-1` of a trajectory sampled at
/// uniform spacing `dt`.
pub fn euler_lagrange_residual(
    sp: &Spectral,
    states: &[SemiclassicalState],
    dt: f64,
    k: &Constants,
) -> Result<Vec<ElResidual>> {
    if states.len() < 3 {
        return Err(Error::ShortTrajectory(states.len()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let mut out = Vec::with_capacity(states.len() - 2);
    for w in states.windows(3) {
        let (prev, cur, next) = (&w[0], &w[1], &w[2]);

        // Ampère, transverse part
        let mut a_ddot = next.a_perp.clone();
        a_ddot.add_scaled(-2.0, &cur.a_perp)?;
        a_ddot.add_scaled(1.0, &prev.a_perp)?;
        let a_ddot = a_ddot.scaled(1.0 / (dt * dt * k.c * k.c));
        let a_spec = sp.forward_vector(&cur.a_perp)?;
        let curl_curl = sp.inverse_vector(sp.curl_spectrum(&sp.curl_spectrum(&a_spec)));
        let j = current_density(sp, &cur.psi, &cur.a_perp, k)?;
        let source = sp.transverse_source(&j)?.scaled(4.0 * PI / k.c);
        let mut res = curl_curl.clone();
        res.add_scaled(-1.0, &source)?;
        res.add_scaled(1.0, &a_ddot)?;
        let scale = curl_curl.norm().max(source.norm()).max(a_ddot.norm()).max(RESIDUAL_FLOOR);
        let ampere = res.norm() / scale;

        // Gauss: E = -∇V - Ȧ/c; Ȧ is transverse so only ∇V contributes
        let rho = charge_density(sp, &cur.psi, k)?;
        let v = sp.solve_coulomb(&rho)?;
        let mut a_dot = next.a_perp.clone();
        a_dot.add_scaled(-1.0, &prev.a_perp)?;
        let mut e = sp.gradient(&v)?.scaled(-1.0);
        e.add_scaled(-1.0 / (2.0 * dt * k.c), &a_dot)?;
        let div_e = sp.divergence(&e)?;
        let mut src = sp.resolved_part(&rho)?;
        src.values.iter_mut().for_each(|r| *r *= 4.0 * PI);
        let mut g_res = div_e;
        g_res.add_scaled(-1.0, &src)?;
        let gauss = g_res.norm() / src.norm().max(RESIDUAL_FLOOR);

        // Schrödinger
        let h = apply_matter_hamiltonian(sp, &cur.psi, &cur.a_perp, &v, k)?;
        let c = C64::new(0.0, k.hbar / (2.0 * dt));
        let mut num = 0.0;
        let mut lhs_norm = 0.0;
        for i in 0..h.values.len() {
            let lhs = c * (next.psi.values[i] - prev.psi.values[i]);
            num += (lhs - h.values[i]).norm_sqr();
            lhs_norm += lhs.norm_sqr();
        }
        let dv = sp.grid().cell_volume();
        let schrodinger =
            (num * dv).sqrt() / h.norm().max((lhs_norm * dv).sqrt()).max(RESIDUAL_FLOOR);

        out.push(ElResidual { t: cur.t, ampere, gauss, schrodinger });
    }
    Ok(out)
}
