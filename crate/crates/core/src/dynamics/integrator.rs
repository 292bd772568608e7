//! Second-order Strang splitting for the Coulomb-gauge Hamiltonian
//!
//!   H = [field + free kinetic] + [A² + Coulomb] + [paramagnetic A·p].
//!
//! One step is F(dt/2) D(dt/2) P(dt) D(dt/2) F(dt/2):
//!
//! * F rotates every Fourier mode of (A_⊥, Π_⊥) as a free oscillator with
//!   ω = c|k| and advances ψ with the free propagator, both exactly.
//! * D multiplies ψ by the pointwise phase of (e²/2mc²)A² + eV. |ψ| is
//!   unchanged, so V stays fixed and the flow is exact.
//! * P applies exp(-i dt K/ħ) with K = -(e/2mc)(A·p + p·A) by a Taylor
//!   series summed to rounding, so ψ stays normalized to ~1e-15 per step.
//!
//! A_⊥ is constant across D P D, so the force on Π_⊥ from those substeps is
//! accumulated in position space and applied once, projected transverse with
//! the uniform mode removed.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dynamics::rhs::apply_paramagnetic;
use crate::dynamics::SemiclassicalState;
use crate::error::{Error, Result};
use crate::grid::{ComplexScalarField, RealVectorField};
use crate::sources::{charge_density, paramagnetic_current, Constants};
use crate::spectral::{dot, Spectral};

const TAYLOR_TOL: f64 = 1e-17;
const TAYLOR_MAX_TERMS: usize = 40;
/// Largest dt·‖K‖/ħ handled by one Taylor sum.
const TAYLOR_MAX_ARG: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct StrangIntegrator {
    sp: Spectral,
    k: Constants,
}

impl StrangIntegrator {
    pub fn new(sp: Spectral, k: Constants) -> Self {
        Self { sp, k }
    }

    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }

    pub fn constants(&self) -> &Constants {
        &self.k
    }

    pub fn step(&self, state: &SemiclassicalState, dt: f64) -> Result<SemiclassicalState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTimeStep(dt));
        }
        let sp = &self.sp;
        let mut psi = state.psi.values.clone();
        let mut a_hat = sp.forward_vector(&state.a_perp)?;
        let mut pi_hat = sp.forward_vector(&state.pi_perp)?;

        self.free_flow(&mut psi, &mut a_hat, &mut pi_hat, 0.5 * dt);

        let a = sp.inverse_vector(a_hat.clone());
        let mut force = RealVectorField::zeros(*sp.grid());
        self.diagonal_flow(&mut psi, &a, 0.5 * dt, &mut force)?;
        self.paramagnetic_flow(&mut psi, &a, dt, &mut force)?;
        self.diagonal_flow(&mut psi, &a, 0.5 * dt, &mut force)?;

        let mut kick = sp.forward_vector(&force)?;
        sp.project_spectrum(&mut kick, true);
        for c in 0..3 {
            pi_hat[c].iter_mut().zip(&kick[c]).for_each(|(p, f)| *p += f);
        }

        self.free_flow(&mut psi, &mut a_hat, &mut pi_hat, 0.5 * dt);

        let t = state.t + dt;
        let out = SemiclassicalState {
            psi: ComplexScalarField { grid: *sp.grid(), values: psi },
            a_perp: sp.inverse_vector(a_hat),
            pi_perp: sp.inverse_vector(pi_hat),
            t,
        };
        if !out.psi.is_finite() {
            return Err(Error::NonFinite { what: "psi", t });
        }
        if !(out.a_perp.is_finite() && out.pi_perp.is_finite()) {
            return Err(Error::NonFinite { what: "transverse field", t });
        }
        Ok(out)
    }

    /// Runs `steps` steps, calling `observe` on the initial state and after
    /// every step.
    pub fn evolve(
        &self,
        state: &SemiclassicalState,
        dt: f64,
        steps: usize,
        mut observe: impl FnMut(usize, &SemiclassicalState) -> Result<()>,
    ) -> Result<SemiclassicalState> {
        let mut s = state.clone();
        observe(0, &s)?;
        for n in 1..=steps {
            s = self.step(&s, dt)?;
            observe(n, &s)?;
        }
        Ok(s)
    }

    fn free_flow(&self, psi: &mut [C64], a_hat: &mut [Vec<C64>; 3], pi_hat: &mut [Vec<C64>; 3], tau: f64) {
        let sp = &self.sp;
        let k = &self.k;
        sp.forward_in_place(psi);
        let kin = k.hbar / (2.0 * k.mass);
        let four_pi_c2 = 4.0 * PI * k.c * k.c;
        for (idx, &q) in sp.wavevectors().iter().enumerate() {
            let q2 = dot(q, q);
            psi[idx] *= C64::from_polar(1.0, -kin * q2 * tau);
            let omega = k.c * q2.sqrt();
            let (s, c) = (omega * tau).sin_cos();
            for comp in 0..3 {
                let a0 = a_hat[comp][idx];
                let p0 = pi_hat[comp][idx];
                if omega > 0.0 {
                    a_hat[comp][idx] = a0 * c + p0 * (four_pi_c2 * s / omega);
                    pi_hat[comp][idx] = p0 * c - a0 * (omega * s / four_pi_c2);
                } else {
                    a_hat[comp][idx] = a0 + p0 * (four_pi_c2 * tau);
                }
            }
        }
        sp.inverse_in_place(psi);
    }

    fn diagonal_flow(&self, psi: &mut [C64], a: &RealVectorField, tau: f64, force: &mut RealVectorField) -> Result<()> {
        let sp = &self.sp;
        let k = &self.k;
        let field = ComplexScalarField { grid: *sp.grid(), values: psi.to_vec() };
        let rho = charge_density(sp, &field, k)?;
        let v = sp.solve_coulomb(&rho)?;
        let q = k.coupling();
        let dia = q * q / (2.0 * k.mass);
        let a2 = a.magnitude_sqr();
        for i in 0..psi.len() {
            let density = psi[i].norm_sqr();
            psi[i] *= C64::from_polar(1.0, -tau * (dia * a2[i] + k.charge * v.values[i]) / k.hbar);
            // Π̇ = -δH/δA = -(q²/m) A|ψ|²
            for c in 0..3 {
                force.components[c][i] -= tau * q * q / k.mass * a.components[c][i] * density;
            }
        }
        Ok(())
    }

    fn paramagnetic_flow(&self, psi: &mut [C64], a: &RealVectorField, tau: f64, force: &mut RealVectorField) -> Result<()> {
        let sp = &self.sp;
        let k = &self.k;
        let kmax = sp.grid().max_resolved_wavenumber();
        let amax: f64 = a.components.iter().map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs()))).sum();
        let bound = tau * k.coupling().abs() / k.mass * amax * kmax;
        if bound == 0.0 {
            return Ok(());
        }
        let substeps = (bound / TAYLOR_MAX_ARG).ceil().max(1.0) as usize;
        let h = tau / substeps as f64;
        let grid = *sp.grid();
        // Π̇ = (q/m) Re(ψ* p ψ) = j_para / c; trapezoid rule per substep
        let mut j_prev = paramagnetic_current(sp, &ComplexScalarField { grid, values: psi.to_vec() }, k)?;
        for _ in 0..substeps {
            self.taylor_exp(psi, a, h);
            let j_next = paramagnetic_current(sp, &ComplexScalarField { grid, values: psi.to_vec() }, k)?;
            force.add_scaled(0.5 * h / k.c, &j_prev)?;
            force.add_scaled(0.5 * h / k.c, &j_next)?;
            j_prev = j_next;
        }
        Ok(())
    }

    /// ψ ← exp(-i h K/ħ) ψ.
    fn taylor_exp(&self, psi: &mut [C64], a: &RealVectorField, h: f64) {
        let sp = &self.sp;
        let norm0: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut term = psi.to_vec();
        let factor = C64::new(0.0, -h / self.k.hbar);
        for n in 1..=TAYLOR_MAX_TERMS {
            let term_hat = sp.forward_complex(&term);
            let kt = apply_paramagnetic(sp, &term_hat, &term, a, &self.k);
            let s = factor / n as f64;
            term = kt.into_iter().map(|z| z * s).collect();
            let mut tn = 0.0;
            for (p, t) in psi.iter_mut().zip(&term) {
                *p += t;
                tn += t.norm_sqr();
            }
            if tn.sqrt() <= TAYLOR_TOL * norm0 {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::total_energy;
    use crate::grid::Grid3;
    use crate::random::*;

    fn plane_wave(g: Grid3, m: [f64; 3]) -> ComplexScalarField {
        let l = g.box_length();
        let amp = 1.0 / g.volume().sqrt();
        ComplexScalarField::from_fn(g, |x| {
            C64::from_polar(amp, 2.0 * PI / l * (m[0] * x[0] + m[1] * x[1] + m[2] * x[2]))
        })
    }

    #[test]
    fn rejects_bad_time_step() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let sp = Spectral::new(g);
        let integ = StrangIntegrator::new(sp.clone(), Constants::default());
        let s = SemiclassicalState::vacuum(&sp);
        assert!(integ.step(&s, 0.0).is_err());
        assert!(integ.step(&s, f64::NAN).is_err());
    }

    #[test]
    fn decoupled_plane_wave_is_exact() {
        let g = Grid3::cubic(8, 2.0 * PI).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::default().with_charge(0.0);
        let integ = StrangIntegrator::new(sp.clone(), k);
        let m = [1.0, 2.0, 0.0];
        let mut s = SemiclassicalState::new(
            &sp,
            plane_wave(g, m),
            band_limited_transverse(g, 2, 1),
            RealVectorField::zeros(g),
            0.0,
        )
        .unwrap();
        let dt = 0.01;
        for _ in 0..5 {
            let before = s.psi.clone();
            s = integ.step(&s, dt).unwrap();
            let phase = C64::from_polar(1.0, -0.5 * 5.0 * dt);
            for (a, b) in s.psi.values.iter().zip(&before.values) {
                assert!((a - b * phase).norm() < 1e-12 * b.norm());
            }
        }
    }

    #[test]
    fn free_modes_trace_circles() {
        let g = Grid3::cubic(8, 2.0).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::default().with_charge(0.0);
        let integ = StrangIntegrator::new(sp.clone(), k);
        let a0 = band_limited_transverse(g, 2, 3);
        let p0 = band_limited_transverse(g, 2, 4).scaled(1e-4);
        let mut s = SemiclassicalState::new(&sp, ComplexScalarField::zeros(g), a0, p0, 0.0).unwrap();
        let radii = |s: &SemiclassicalState| -> Vec<f64> {
            let ah = sp.forward_vector(&s.a_perp).unwrap();
            let ph = sp.forward_vector(&s.pi_perp).unwrap();
            sp.wavevectors()
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    let w = k.c * dot(*q, *q).sqrt();
                    if w == 0.0 {
                        return 0.0;
                    }
                    (0..3)
                        .map(|c| ah[c][i].norm_sqr() + (4.0 * PI * k.c * k.c / w * ph[c][i]).norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        };
        let r0 = radii(&s);
        let scale = r0.iter().cloned().fold(0.0, f64::max);
        for _ in 0..1000 {
            s = integ.step(&s, 1e-3).unwrap();
        }
        let r1 = radii(&s);
        for (a, b) in r0.iter().zip(&r1) {
            assert!((a - b).abs() <= 1e-10 * scale, "{a} {b}");
        }
    }

    #[test]
    fn coupled_step_preserves_norm_and_transversality() {
        let g = Grid3::cubic(16, 6.0).unwrap();
        let sp = Spectral::new(g);
        let k = Constants::new(1.0, 1.0, -1.0, 3.0).unwrap();
        let integ = StrangIntegrator::new(sp.clone(), k);
        let mut s = SemiclassicalState::new(
            &sp,
            band_limited_complex(g, 2, 1),
            band_limited_transverse(g, 1, 2),
            RealVectorField::zeros(g),
            0.0,
        )
        .unwrap();
        let n0 = s.psi.norm_sqr();
        let e0 = total_energy(&sp, &s, &k).unwrap().total;
        for _ in 0..50 {
            s = integ.step(&s, 2e-3).unwrap();
        }
        assert!((s.psi.norm_sqr() - n0).abs() < 1e-12);
        assert!(crate::dynamics::relative_divergence(&sp, &s.a_perp).unwrap() < 1e-10);
        assert!(crate::dynamics::relative_divergence(&sp, &s.pi_perp).unwrap() < 1e-10);
        let e1 = total_energy(&sp, &s, &k).unwrap().total;
        assert!(((e1 - e0) / e0).abs() < 1e-5, "{e0} {e1}");
    }
}
