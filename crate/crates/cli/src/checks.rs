//! Measurements behind `verify` and the acceptance suite. Each returns the
//! measured quantity; thresholds live with the callers.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use nrqed_core::dynamics::{relative_divergence, SemiclassicalState, StrangIntegrator};
use nrqed_core::eigen::{dense_eigenvalues, lanczos, LanczosOptions};
use nrqed_core::fock::{enumerate_sector, FockSector, Ladder, SectorParams};
use nrqed_core::grid::{ComplexScalarField, RealScalarField, RealVectorField};
use nrqed_core::hamiltonian::{assemble_h_qed, build_coulomb, SparseHamiltonian};
use nrqed_core::modes::ModeSet;
use nrqed_core::random::{band_limited_complex, band_limited_real, band_limited_transverse};
use nrqed_core::sources::{
    charge_density, continuity_residual, current_density, electric_field, gauge_transform, Constants, GaugeFields,
    RESIDUAL_FLOOR,
};
use nrqed_core::spectral::Spectral;

use crate::CliError;

/// Largest sector handed to the dense oracle.
pub const DENSE_LIMIT: usize = 2000;

fn rel_scalar(a: &RealScalarField, b: &RealScalarField) -> f64 {
    let d: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum();
    let n: f64 = b.values.iter().map(|y| y * y).sum();
    (d / n.max(RESIDUAL_FLOOR)).sqrt()
}

fn rel_vector(a: &RealVectorField, b: &RealVectorField) -> Result<f64, CliError> {
    Ok(a.sub(b)?.norm() / b.norm().max(RESIDUAL_FLOOR))
}

/// Relative continuity residual for seeded band-limited ψ, A_⊥ and V.
pub fn continuity(sp: &Spectral, k: &Constants, max_mode: usize, seed: u64) -> Result<f64, CliError> {
    let g = *sp.grid();
    let psi = band_limited_complex(g, max_mode, seed);
    let a = band_limited_transverse(g, max_mode, seed + 1);
    let v = band_limited_real(g, max_mode, seed + 2);
    Ok(continuity_residual(sp, &psi, &a, &v, k)?.relative)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeReport {
    /// Largest relative change of ρ, j, B and E under one transformation.
    pub observables: f64,
    /// Transforming by χ₁ then χ₂ against χ₁ + χ₂ in one go.
    pub composition: f64,
}

/// Applies seeded random gauge functions to seeded random fields.
pub fn gauge(sp: &Spectral, k: &Constants, max_mode: usize, seed: u64) -> Result<GaugeReport, CliError> {
    let g = *sp.grid();
    let fields = GaugeFields {
        v: band_limited_real(g, max_mode, seed),
        a: band_limited_transverse(g, max_mode, seed + 1),
        psi: band_limited_complex(g, max_mode, seed + 2),
    };
    let a_dot = band_limited_transverse(g, max_mode, seed + 3);
    let chi = band_limited_real(g, max_mode, seed + 4);
    let chi_dot = band_limited_real(g, max_mode, seed + 5);

    let observe = |f: &GaugeFields, a_dot: &RealVectorField| -> Result<_, CliError> {
        let rho = charge_density(sp, &f.psi, k)?;
        let j = current_density(sp, &f.psi, &f.a, k)?;
        let b = sp.curl(&f.a)?;
        let e = electric_field(sp, &f.v, a_dot, k)?;
        Ok((rho, j, b, e))
    };
    let before = observe(&fields, &a_dot)?;
    let moved = gauge_transform(sp, &fields, &chi, &chi_dot, k)?;
    let mut a_dot_moved = a_dot.clone();
    a_dot_moved.add_scaled(-1.0, &sp.gradient(&chi_dot)?)?;
    let after = observe(&moved, &a_dot_moved)?;
    let observables = rel_scalar(&after.0, &before.0)
        .max(rel_vector(&after.1, &before.1)?)
        .max(rel_vector(&after.2, &before.2)?)
        .max(rel_vector(&after.3, &before.3)?);

    let chi2 = band_limited_real(g, max_mode, seed + 6);
    let chi2_dot = band_limited_real(g, max_mode, seed + 7);
    let twice = gauge_transform(sp, &moved, &chi2, &chi2_dot, k)?;
    let mut chi_sum = chi.clone();
    chi_sum.add_scaled(1.0, &chi2)?;
    let mut chi_dot_sum = chi_dot.clone();
    chi_dot_sum.add_scaled(1.0, &chi2_dot)?;
    let once = gauge_transform(sp, &fields, &chi_sum, &chi_dot_sum, k)?;
    let psi_diff = twice.psi.values.iter().zip(&once.psi.values).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
        / once.psi.values.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    let composition =
        rel_scalar(&twice.v, &once.v).max(rel_vector(&twice.a, &once.a)?).max(psi_diff);
    Ok(GaugeReport { observables, composition })
}

/// Relative period error of every decoupled A_⊥ mode in `modes`.
///
/// Each ±q shell is excited on its own with charge switched off and evolved
/// for one nominal period 2π/(c|q|) in `steps` steps; the phase of
/// Â + i(4πc²/ω)Π̂ in the +q bin then measures the period mismatch.
pub fn free_mode_period_error(sp: &Spectral, k: &Constants, modes: &ModeSet, steps: usize) -> Result<f64, CliError> {
    let g = *sp.grid();
    let k0 = k.with_charge(0.0);
    let integ = StrangIntegrator::new(sp.clone(), k0);
    let l = g.box_length();
    let mut worst = 0.0f64;
    for m in modes.modes().iter().step_by(2) {
        for e in m.polarizations {
            let a = RealVectorField::from_fn(g, |x| {
                let c = 0.7 * (m.q[0] * x[0] + m.q[1] * x[1] + m.q[2] * x[2]).cos();
                [c * e[0], c * e[1], c * e[2]]
            });
            let state = SemiclassicalState::new(sp, ComplexScalarField::zeros(g), a, RealVectorField::zeros(g), 0.0)?;
            let omega = m.omega(k.c);
            let period = 2.0 * PI / omega;
            let end = integ.evolve(&state, period / steps as f64, steps, |_, _| Ok(()))?;
            let bin = {
                let n = g.shape();
                let b: Vec<usize> = (0..3)
                    .map(|a| g.bin_of_mode(a, (m.q[a] * l / (2.0 * PI)).round() as i64).expect("mode on grid"))
                    .collect();
                b[0] + n[0] * (b[1] + n[1] * b[2])
            };
            let amplitude = |s: &SemiclassicalState| -> Result<C64, CliError> {
                let ah = sp.forward_vector(&s.a_perp)?;
                let ph = sp.forward_vector(&s.pi_perp)?;
                let scale = 4.0 * PI * k.c * k.c / omega;
                Ok((0..3).map(|i| e[i] * (ah[i][bin] + C64::new(0.0, scale) * ph[i][bin])).sum())
            };
            let z0 = amplitude(&state)?;
            let z1 = amplitude(&end)?;
            let dphi = (z1 / z0).arg();
            worst = worst.max(dphi.abs() / (2.0 * PI));
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortRun {
    pub norm_change: f64,
    pub max_divergence: f64,
}

/// Norm change and transversality of A_⊥ along a short coupled run.
pub fn short_run(integ: &StrangIntegrator, state: &SemiclassicalState, dt: f64, steps: usize) -> Result<ShortRun, CliError> {
    let sp = integ.spectral();
    let n0 = state.psi.norm_sqr();
    let mut out = ShortRun { norm_change: 0.0, max_divergence: 0.0 };
    integ.evolve(state, dt, steps, |_, s| {
        out.norm_change = out.norm_change.max((s.psi.norm_sqr() - n0).abs());
        out.max_divergence = out.max_divergence.max(relative_divergence(sp, &s.a_perp)?);
        Ok(())
    })?;
    Ok(out)
}

/// Closed-form decoupled energies Σħc|q|n + Σħ²k²/2m of every basis state,
/// ascending.
pub fn decoupled_energies(sector: &FockSector, modes: &ModeSet, k: &Constants) -> Vec<f64> {
    let mut e: Vec<f64> = (0..sector.dimension())
        .map(|i| {
            let photons: f64 = sector
                .photons(i)
                .iter()
                .enumerate()
                .map(|(s, &n)| k.hbar * k.c * modes.modes()[s / 2].magnitude() * n as f64)
                .sum();
            let kinetic: f64 = sector
                .electrons(i)
                .iter()
                .map(|&o| {
                    let q = sector.orbital_wavevector(o);
                    k.hbar * k.hbar * (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) / (2.0 * k.mass)
                })
                .sum();
            photons + kinetic
        })
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Lowest `n` eigenvalues: dense below [`DENSE_LIMIT`], Lanczos above.
pub fn lowest_eigenvalues(h: &SparseHamiltonian, n: usize, seed: u64) -> Result<Vec<f64>, CliError> {
    let n = n.min(h.dimension());
    if h.dimension() <= DENSE_LIMIT {
        Ok(dense_eigenvalues(h)[..n].to_vec())
    } else {
        let opts = LanczosOptions { n_eigs: n, tol: 1e-12, max_iter: 500, seed, want_vectors: false };
        Ok(lanczos(h, &opts)?.eigenvalues)
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Stored entries of `h` joining different total-momentum blocks.
pub fn momentum_violations(h: &SparseHamiltonian, sector: &FockSector) -> usize {
    h.entries().iter().filter(|&&(r, c, _)| sector.total_momentum(r) != sector.total_momentum(c)).count()
}

/// Largest eigenvalue change when every ±q pair's polarization basis is
/// rotated by a different angle.
pub fn rotation_invariance(modes: &ModeSet, params: SectorParams, k: &Constants, n: usize) -> Result<f64, CliError> {
    let rotated = modes.rotated_polarizations(|p| 0.37 + 0.61 * p as f64);
    let s1 = enumerate_sector(modes, params)?;
    let s2 = enumerate_sector(&rotated, params)?;
    let e1 = lowest_eigenvalues(&assemble_h_qed(&s1, modes, k)?, n, 1)?;
    let e2 = lowest_eigenvalues(&assemble_h_qed(&s2, &rotated, k)?, n, 1)?;
    Ok(max_abs_diff(&e1, &e2))
}

/// Number of stored entries and largest magnitude of the Coulomb term on a
/// one-electron sector.
pub fn single_electron_coulomb(modes: &ModeSet, params: SectorParams, k: &Constants) -> Result<(usize, f64), CliError> {
    let s = enumerate_sector(modes, SectorParams { n_electrons: 1, ..params })?;
    let h = build_coulomb(&s, modes, k)?;
    Ok((h.entries().len(), h.entries().iter().map(|e| e.2.norm()).fold(0.0, f64::max)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderReport {
    /// max |[b_s, b†_t] - δ_st| on states where neither creation truncates.
    pub commutator: f64,
    /// max |⟨i|b†|j⟩ - conj⟨j|b|i⟩|.
    pub adjoint: f64,
    /// Whether [b, b†] differs from the identity somewhere on the top states.
    pub truncation_visible: bool,
}

/// Builds dense b_s, b†_s on `sector` from [`FockSector::apply_ladder`].
pub fn ladder_algebra(sector: &FockSector) -> Result<LadderReport, CliError> {
    let dim = sector.dimension();
    let slots = sector.slots();
    let unit = |i: usize| {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[i] = C64::new(1.0, 0.0);
        v
    };
    // columns of each operator
    let mut ann = Vec::with_capacity(slots);
    let mut cre = Vec::with_capacity(slots);
    for s in 0..slots {
        let cols_a: Result<Vec<_>, _> = (0..dim).map(|i| sector.apply_ladder(&unit(i), s / 2, s % 2, Ladder::Annihilate)).collect();
        let cols_c: Result<Vec<_>, _> = (0..dim).map(|i| sector.apply_ladder(&unit(i), s / 2, s % 2, Ladder::Create)).collect();
        ann.push(cols_a?);
        cre.push(cols_c?);
    }
    let p = *sector.params();
    let mut report = LadderReport { commutator: 0.0, adjoint: 0.0, truncation_visible: false };
    let apply = |op: &Vec<Vec<C64>>, v: &[C64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (j, &x) in v.iter().enumerate() {
            if x != C64::new(0.0, 0.0) {
                for (o, c) in out.iter_mut().zip(&op[j]) {
                    *o += c * x;
                }
            }
        }
        out
    };
    for s in 0..slots {
        for i in 0..dim {
            for j in 0..dim {
                report.adjoint = report.adjoint.max((cre[s][j][i] - ann[s][i][j].conj()).norm());
            }
        }
        for t in 0..slots {
            for i in 0..dim {
                let ph = sector.photons(i);
                let total: u32 = ph.iter().map(|&n| n as u32).sum();
                let interior = total < p.n_ph_max && ph[s] < p.n_max && ph[t] < p.n_max;
                let e = unit(i);
                let bbd = apply(&ann[s], &apply(&cre[t], &e));
                let bdb = apply(&cre[t], &apply(&ann[s], &e));
                let err = (0..dim)
                    .map(|r| {
                        let want = if r == i && s == t { 1.0 } else { 0.0 };
                        (bbd[r] - bdb[r] - want).norm()
                    })
                    .fold(0.0, f64::max);
                if interior {
                    report.commutator = report.commutator.max(err);
                } else if err > 0.5 {
                    report.truncation_visible = true;
                }
            }
        }
    }
    Ok(report)
}
