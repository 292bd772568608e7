use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dynamics::SemiclassicalState;
use crate::error::{Error, Result};
use crate::grid::{ComplexScalarField, RealScalarField, RealVectorField};
use crate::sources::{Constants, RESIDUAL_FLOOR};
use crate::spectral::{dot, Spectral};

/// Largest ‖∇·A‖/‖∇A‖ accepted for a transverse field.
pub const TRANSVERSE_TOLERANCE: f64 = 1e-10;

/// ‖∇·A‖ / ‖∇A‖ evaluated by Parseval in Fourier space.
pub fn relative_divergence(sp: &Spectral, a: &RealVectorField) -> Result<f64> {
    let spec = sp.forward_vector(a)?;
    let mut div = 0.0;
    let mut full = 0.0;
    for (idx, &q) in sp.wavevectors().iter().enumerate() {
        let kv = q[0] * spec[0][idx] + q[1] * spec[1][idx] + q[2] * spec[2][idx];
        div += kv.norm_sqr();
        full += dot(q, q) * (spec[0][idx].norm_sqr() + spec[1][idx].norm_sqr() + spec[2][idx].norm_sqr());
    }
    Ok((div / full.max(RESIDUAL_FLOOR)).sqrt())
}

pub fn check_transverse(sp: &Spectral, a: &RealVectorField) -> Result<()> {
    let r = relative_divergence(sp, a)?;
    if r > TRANSVERSE_TOLERANCE {
        Err(Error::NotTransverse(r))
    } else {
        Ok(())
    }
}

/// -(q/2m)(A·p + p·A)ψ with p = -iħ∇ and q = e/c; the symmetric ordering is
/// Hermitian on the grid for any A.
pub(crate) fn apply_paramagnetic(
    sp: &Spectral,
    psi_hat: &[C64],
    psi: &[C64],
    a: &RealVectorField,
    k: &Constants,
) -> Vec<C64> {
    let n = psi.len();
    let wv = sp.wavevectors();
    let mut a_grad = vec![C64::new(0.0, 0.0); n];
    let mut div_hat = vec![C64::new(0.0, 0.0); n];
    for axis in 0..3 {
        let mut d: Vec<C64> = psi_hat.iter().zip(wv).map(|(p, q)| C64::new(0.0, q[axis]) * p).collect();
        sp.inverse_in_place(&mut d);
        for ((acc, di), av) in a_grad.iter_mut().zip(&d).zip(&a.components[axis]) {
            *acc += di * av;
        }
        let mut ap: Vec<C64> = psi.iter().zip(&a.components[axis]).map(|(p, av)| p * av).collect();
        sp.forward_in_place(&mut ap);
        for ((acc, v), q) in div_hat.iter_mut().zip(&ap).zip(wv) {
            *acc += C64::new(0.0, q[axis]) * v;
        }
    }
    sp.inverse_in_place(&mut div_hat);
    // -(q/2m)(-iħ)(A·∇ψ + ∇·(Aψ))
    let s = C64::new(0.0, k.hbar * k.coupling() / (2.0 * k.mass));
    a_grad.iter().zip(&div_hat).map(|(x, y)| s * (x + y)).collect()
}

/// hψ = (1/2m)(-iħ∇ - (e/c)A)²ψ + eVψ, with the kinetic square expanded in
/// symmetric (Weyl) order.
pub fn apply_matter_hamiltonian(
    sp: &Spectral,
    psi: &ComplexScalarField,
    a: &RealVectorField,
    v: &RealScalarField,
    k: &Constants,
) -> Result<ComplexScalarField> {
    let g = sp.grid();
    g.check_same(&psi.grid)?;
    g.check_same(&a.grid)?;
    g.check_same(&v.grid)?;
    let psi_hat = sp.forward_complex(&psi.values);
    let kin = k.hbar * k.hbar / (2.0 * k.mass);
    let mut out: Vec<C64> =
        psi_hat.iter().zip(sp.wavevectors()).map(|(p, &q)| p * (kin * dot(q, q))).collect();
    sp.inverse_in_place(&mut out);
    let para = apply_paramagnetic(sp, &psi_hat, &psi.values, a, k);
    let dia = k.coupling() * k.coupling() / (2.0 * k.mass);
    let a2 = a.magnitude_sqr();
    for i in 0..out.len() {
        out[i] += para[i] + (dia * a2[i] + k.charge * v.values[i]) * psi.values[i];
    }
    Ok(ComplexScalarField { grid: psi.grid, values: out })
}

/// ∂ψ/∂t = (1/iħ) h(A, V) ψ. Rejects a non-transverse A.
pub fn schrodinger_rhs(
    sp: &Spectral,
    psi: &ComplexScalarField,
    a: &RealVectorField,
    v: &RealScalarField,
    k: &Constants,
) -> Result<ComplexScalarField> {
    check_transverse(sp, a)?;
    let mut h = apply_matter_hamiltonian(sp, psi, a, v, k)?;
    let s = C64::new(0.0, -1.0 / k.hbar);
    h.values.iter_mut().for_each(|z| *z *= s);
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct FieldRates {
    pub a_dot: RealVectorField,
    pub pi_dot: RealVectorField,
}

/// ∂A_⊥/∂t = 4πc²Π_⊥ and ∂Π_⊥/∂t = -(1/4π)∇×∇×A_⊥ + (1/c)P_⊥ j.
///
/// The uniform mode of the source is dropped, matching the integrator which
/// holds the k = 0 mode of A_⊥ fixed.
pub fn maxwell_transverse_rhs(
    sp: &Spectral,
    state: &SemiclassicalState,
    j: &RealVectorField,
    k: &Constants,
) -> Result<FieldRates> {
    let a_dot = state.pi_perp.scaled(4.0 * PI * k.c * k.c);
    let a_spec = sp.forward_vector(&state.a_perp)?;
    let cc = sp.curl_spectrum(&sp.curl_spectrum(&a_spec));
    let mut pi_dot = sp.inverse_vector(cc).scaled(-1.0 / (4.0 * PI));
    pi_dot.add_scaled(1.0 / k.c, &sp.transverse_source(j)?)?;
    Ok(FieldRates { a_dot, pi_dot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid3;
    use crate::random::*;
    use crate::sources::{current_density, electric_field};

    fn plane_wave(g: Grid3, m: [f64; 3]) -> ComplexScalarField {
        let l = g.box_length();
        let amp = 1.0 / g.volume().sqrt();
        ComplexScalarField::from_fn(g, |x| {
            C64::from_polar(amp, 2.0 * PI / l * (m[0] * x[0] + m[1] * x[1] + m[2] * x[2]))
        })
    }

    #[test]
    fn free_plane_wave_phase_rate() {
        let g = Grid3::cubic(8, 2.0 * PI).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::default();
        let psi = plane_wave(g, [2.0, -1.0, 0.0]);
        let zero_a = RealVectorField::zeros(g);
        let zero_v = RealScalarField::zeros(g);
        let d = schrodinger_rhs(&sp, &psi, &zero_a, &zero_v, &k).unwrap();
        let k2 = 5.0;
        for (dz, z) in d.values.iter().zip(&psi.values) {
            let want = C64::new(0.0, -k.hbar * k2 / (2.0 * k.mass)) * z;
            assert!((dz - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn constant_vector_potential_shifts_momentum() {
        let l = 3.0;
        let g = Grid3::cubic(8, l).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::new(1.0, 1.5, -2.0, 4.0).unwrap();
        let m = [1.0, 2.0, -1.0];
        let psi = plane_wave(g, m);
        let avec = [0.4, -1.1, 0.25];
        let a = RealVectorField::from_fn(g, |_| avec);
        let d = schrodinger_rhs(&sp, &psi, &a, &RealScalarField::zeros(g), &k).unwrap();
        let shifted: f64 = (0..3)
            .map(|i| (k.hbar * 2.0 * PI * m[i] / l - k.coupling() * avec[i]).powi(2))
            .sum();
        let energy = shifted / (2.0 * k.mass);
        for (dz, z) in d.values.iter().zip(&psi.values) {
            let want = C64::new(0.0, -energy / k.hbar) * z;
            assert!((dz - want).norm() < 1e-12 * want.norm());
        }
    }

    #[test]
    fn rhs_conserves_norm() {
        let g = Grid3::cubic(16, 2.5).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::new(1.0, 1.0, -1.0, 2.0).unwrap();
        let psi = band_limited_complex(g, 3, 1);
        let a = band_limited_transverse(g, 2, 2);
        let v = band_limited_real(g, 2, 3);
        let d = schrodinger_rhs(&sp, &psi, &a, &v, &k).unwrap();
        let rate = 2.0 * psi.inner(&d).unwrap().re;
        let scale = d.norm() * psi.norm();
        assert!(rate.abs() < 1e-11 * scale, "{rate}");
    }

    #[test]
    fn longitudinal_potential_rejected() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let sp = Spectral::new(g);
        let a = sp.gradient(&band_limited_real(g, 2, 1)).unwrap();
        let psi = band_limited_complex(g, 2, 2);
        let r = schrodinger_rhs(&sp, &psi, &a, &RealScalarField::zeros(g), &Constants::default());
        assert!(matches!(r, Err(Error::NotTransverse(_))));
    }

    #[test]
    fn longitudinal_current_is_not_a_source() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::default();
        let j = sp.gradient(&band_limited_real(g, 2, 4)).unwrap();
        let state = SemiclassicalState::vacuum(&sp);
        let rates = maxwell_transverse_rhs(&sp, &state, &j, &k).unwrap();
        assert!(rates.pi_dot.max_abs() < 1e-12 * j.max_abs());
    }

    #[test]
    fn poynting_balance() {
        // d/dt ∫[2πc²Π² + (1/8π)|∇×A|²] = -∫ j·E_⊥ with E_⊥ = -(1/c)∂A/∂t
        let g = Grid3::cubic(16, 2.0).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::new(1.0, 1.0, -1.0, 3.0).unwrap();
        let psi = band_limited_complex(g, 2, 5);
        let state = SemiclassicalState::new(
            &sp,
            psi,
            band_limited_transverse(g, 3, 6),
            band_limited_transverse(g, 3, 7).scaled(0.01),
            0.0,
        )
        .unwrap();
        let j = current_density(&sp, &state.psi, &state.a_perp, &k).unwrap();
        let rates = maxwell_transverse_rhs(&sp, &state, &j, &k).unwrap();
        let curl_a = sp.curl(&state.a_perp).unwrap();
        let curl_adot = sp.curl(&rates.a_dot).unwrap();
        let lhs = 4.0 * PI * k.c * k.c * state.pi_perp.inner(&rates.pi_dot).unwrap()
            + curl_a.inner(&curl_adot).unwrap() / (4.0 * PI);
        let e_perp = electric_field(&sp, &RealScalarField::zeros(g), &rates.a_dot, &k).unwrap();
        let rhs = -j.inner(&e_perp).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * rhs.abs().max(1e-300), "{lhs} vs {rhs}");
    }
}
