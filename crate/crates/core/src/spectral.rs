//! Fourier-space differential operators on a periodic [`Grid3`].
//!
//! All first-order operators use the *resolved* wavenumber per axis: the
//! Nyquist bin gets wavenumber 0. Using the same wavenumbers for the
//! Laplacian, the transverse projector and the Poisson solve makes
//! `div∘grad == laplacian` and `div∘transverse_project == 0` hold to rounding
//! for arbitrary input, at the price of treating pure-Nyquist content as
//! unresolved (it lands in the kernel of the Laplacian, like the mean).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::{ComplexScalarField, ComplexVectorField, Grid3, RealScalarField, RealVectorField};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone)]
pub struct Spectral {
    grid: Grid3,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
    wavenumbers: [Vec<f64>; 3],
    wavevectors: Arc<Vec<[f64; 3]>>,
    dealias: bool,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).field("dealias", &self.dealias).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid3) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.shape();
        let forward = [0, 1, 2].map(|a| planner.plan_fft_forward(n[a]));
        let inverse = [0, 1, 2].map(|a| planner.plan_fft_inverse(n[a]));
        let wavenumbers: [Vec<f64>; 3] = [0, 1, 2].map(|a| {
            (0..n[a])
                .map(|i| {
                    if i == n[a] / 2 {
                        0.0
                    } else {
                        2.0 * PI * grid.mode_number(a, i) as f64 / grid.box_length()
                    }
                })
                .collect()
        });
        let wavevectors: Vec<[f64; 3]> = (0..n[2])
            .flat_map(|k| (0..n[1]).flat_map(move |j| (0..n[0]).map(move |i| (i, j, k))))
            .map(|(i, j, k)| [wavenumbers[0][i], wavenumbers[1][j], wavenumbers[2][k]])
            .collect();
        Self { grid, forward, inverse, wavenumbers, wavevectors: Arc::new(wavevectors), dealias: false }
    }

    /// Enables 2/3-rule truncation of quadratic products (see [`Self::filter`]).
    pub fn with_dealiasing(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn dealiasing(&self) -> bool {
        self.dealias
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    /// Resolved wavevector of Fourier bin `(i, j, k)`.
    #[inline]
    pub fn wavevector(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.wavenumbers[0][i], self.wavenumbers[1][j], self.wavenumbers[2][k]]
    }

    /// Resolved wavevector of every Fourier bin, in storage order.
    pub fn wavevectors(&self) -> &[[f64; 3]] {
        &self.wavevectors
    }

    fn axis_pass(&self, data: &mut [C64], axis: usize, inverse: bool) {
        let [nx, ny, nz] = self.grid.shape();
        let plan = if inverse { &self.inverse[axis] } else { &self.forward[axis] };
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        match axis {
            0 => plan.process_with_scratch(data, &mut scratch),
            1 => {
                // one xy-plane at a time: gather y-lines, transform, scatter
                let plane = nx * ny;
                let mut tmp = vec![C64::new(0.0, 0.0); plane];
                for slab in data.chunks_exact_mut(plane) {
                    for j in 0..ny {
                        for i in 0..nx {
                            tmp[i * ny + j] = slab[i + nx * j];
                        }
                    }
                    plan.process_with_scratch(&mut tmp, &mut scratch);
                    for j in 0..ny {
                        for i in 0..nx {
                            slab[i + nx * j] = tmp[i * ny + j];
                        }
                    }
                }
            }
            _ => {
                // blocks of BLOCK z-lines
                const BLOCK: usize = 64;
                let plane = nx * ny;
                let mut tmp = vec![C64::new(0.0, 0.0); BLOCK * nz];
                let mut p0 = 0;
                while p0 < plane {
                    let b = BLOCK.min(plane - p0);
                    for k in 0..nz {
                        let row = &data[p0 + plane * k..p0 + plane * k + b];
                        for (q, &v) in row.iter().enumerate() {
                            tmp[q * nz + k] = v;
                        }
                    }
                    plan.process_with_scratch(&mut tmp[..b * nz], &mut scratch);
                    for k in 0..nz {
                        let row = &mut data[p0 + plane * k..p0 + plane * k + b];
                        for (q, v) in row.iter_mut().enumerate() {
                            *v = tmp[q * nz + k];
                        }
                    }
                    p0 += b;
                }
            }
        }
    }

    /// Unnormalized forward transform, in place.
    pub fn forward_in_place(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.grid.len());
        for a in 0..3 {
            self.axis_pass(data, a, false);
        }
    }

    /// Inverse transform including the 1/N normalization, in place.
    pub fn inverse_in_place(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.grid.len());
        for a in 0..3 {
            self.axis_pass(data, a, true);
        }
        let s = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn forward_complex(&self, values: &[C64]) -> Vec<C64> {
        let mut d = values.to_vec();
        self.forward_in_place(&mut d);
        d
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<C64> {
        let mut d: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.forward_in_place(&mut d);
        d
    }

    pub fn inverse_complex(&self, mut spectrum: Vec<C64>) -> Vec<C64> {
        self.inverse_in_place(&mut spectrum);
        spectrum
    }

    pub fn inverse_real(&self, spectrum: Vec<C64>) -> Vec<f64> {
        self.inverse_complex(spectrum).into_iter().map(|z| z.re).collect()
    }

    /// Multiplies a spectrum bin-by-bin by `f(k)`.
    fn apply_multiplier(&self, spectrum: &mut [C64], f: impl Fn([f64; 3]) -> C64) {
        let [nx, ny, nz] = self.grid.shape();
        let mut idx = 0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    spectrum[idx] *= f(self.wavevector(i, j, k));
                    idx += 1;
                }
            }
        }
    }

    pub fn gradient_complex(&self, f: &ComplexScalarField) -> Result<ComplexVectorField> {
        self.grid.check_same(&f.grid)?;
        let spec = self.forward_complex(&f.values);
        let components = [0, 1, 2].map(|a| {
            let mut s = spec.clone();
            self.apply_multiplier(&mut s, |k| I * k[a]);
            self.inverse_complex(s)
        });
        Ok(ComplexVectorField { grid: self.grid, components })
    }

    pub fn gradient(&self, f: &RealScalarField) -> Result<RealVectorField> {
        self.grid.check_same(&f.grid)?;
        let spec = self.forward_real(&f.values);
        let components = [0, 1, 2].map(|a| {
            let mut s = spec.clone();
            self.apply_multiplier(&mut s, |k| I * k[a]);
            self.inverse_real(s)
        });
        Ok(RealVectorField { grid: self.grid, components })
    }

    /// Spectra of the three components of a real vector field.
    pub fn forward_vector(&self, v: &RealVectorField) -> Result<[Vec<C64>; 3]> {
        self.grid.check_same(&v.grid)?;
        Ok([0, 1, 2].map(|a| self.forward_real(&v.components[a])))
    }

    pub fn inverse_vector(&self, spec: [Vec<C64>; 3]) -> RealVectorField {
        let components = spec.map(|s| self.inverse_real(s));
        RealVectorField { grid: self.grid, components }
    }

    fn divergence_spectrum(&self, spec: &[Vec<C64>; 3]) -> Vec<C64> {
        let [nx, ny, nz] = self.grid.shape();
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        let mut idx = 0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let q = self.wavevector(i, j, k);
                    out[idx] = I * (q[0] * spec[0][idx] + q[1] * spec[1][idx] + q[2] * spec[2][idx]);
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn divergence(&self, v: &RealVectorField) -> Result<RealScalarField> {
        let spec = self.forward_vector(v)?;
        Ok(RealScalarField { grid: self.grid, values: self.inverse_real(self.divergence_spectrum(&spec)) })
    }

    pub fn divergence_complex(&self, v: &ComplexVectorField) -> Result<ComplexScalarField> {
        self.grid.check_same(&v.grid)?;
        let spec = [0, 1, 2].map(|a| self.forward_complex(&v.components[a]));
        Ok(ComplexScalarField { grid: self.grid, values: self.inverse_complex(self.divergence_spectrum(&spec)) })
    }

    pub fn curl(&self, v: &RealVectorField) -> Result<RealVectorField> {
        let spec = self.forward_vector(v)?;
        Ok(self.inverse_vector(self.curl_spectrum(&spec)))
    }

    /// i k × v̂, bin by bin.
    pub fn curl_spectrum(&self, spec: &[Vec<C64>; 3]) -> [Vec<C64>; 3] {
        let [nx, ny, nz] = self.grid.shape();
        let n = self.grid.len();
        let mut out = [0, 1, 2].map(|_| vec![C64::new(0.0, 0.0); n]);
        let mut idx = 0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let q = self.wavevector(i, j, k);
                    let (vx, vy, vz) = (spec[0][idx], spec[1][idx], spec[2][idx]);
                    out[0][idx] = I * (q[1] * vz - q[2] * vy);
                    out[1][idx] = I * (q[2] * vx - q[0] * vz);
                    out[2][idx] = I * (q[0] * vy - q[1] * vx);
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn laplacian(&self, f: &RealScalarField) -> Result<RealScalarField> {
        self.grid.check_same(&f.grid)?;
        let mut s = self.forward_real(&f.values);
        self.apply_multiplier(&mut s, |k| C64::new(-dot(k, k), 0.0));
        Ok(RealScalarField { grid: self.grid, values: self.inverse_real(s) })
    }

    pub fn laplacian_complex(&self, f: &ComplexScalarField) -> Result<ComplexScalarField> {
        self.grid.check_same(&f.grid)?;
        let mut s = self.forward_complex(&f.values);
        self.apply_multiplier(&mut s, |k| C64::new(-dot(k, k), 0.0));
        Ok(ComplexScalarField { grid: self.grid, values: self.inverse_complex(s) })
    }

    /// Applies P(k) = 1 - k kᵀ/|k|² to a spectrum in place. Bins with
    /// |k| = 0 pass through unchanged unless `drop_zero` is set.
    pub fn project_spectrum(&self, spec: &mut [Vec<C64>; 3], drop_zero: bool) {
        let [nx, ny, nz] = self.grid.shape();
        let mut idx = 0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let q = self.wavevector(i, j, k);
                    let q2 = dot(q, q);
                    if q2 > 0.0 {
                        let kv = (q[0] * spec[0][idx] + q[1] * spec[1][idx] + q[2] * spec[2][idx]) / q2;
                        for a in 0..3 {
                            spec[a][idx] -= q[a] * kv;
                        }
                    } else if drop_zero {
                        for s in spec.iter_mut() {
                            s[idx] = C64::new(0.0, 0.0);
                        }
                    }
                    idx += 1;
                }
            }
        }
    }

    /// Transverse (divergence-free) part of `v`. The uniform mode is kept.
    pub fn transverse_project(&self, v: &RealVectorField) -> Result<RealVectorField> {
        let mut spec = self.forward_vector(v)?;
        self.project_spectrum(&mut spec, false);
        Ok(self.inverse_vector(spec))
    }

    /// Transverse part with the uniform mode removed; this is what drives
    /// the dynamical A_⊥, whose k = 0 mode is held fixed.
    pub fn transverse_source(&self, v: &RealVectorField) -> Result<RealVectorField> {
        let mut spec = self.forward_vector(v)?;
        self.project_spectrum(&mut spec, true);
        Ok(self.inverse_vector(spec))
    }

    /// Periodic Poisson solve ∇²V = -4πρ with V̂(0) = 0 (uniform neutralizing
    /// background).
    pub fn solve_coulomb(&self, rho: &RealScalarField) -> Result<RealScalarField> {
        self.grid.check_same(&rho.grid)?;
        let mut s = self.forward_real(&rho.values);
        self.apply_multiplier(&mut s, |k| {
            let k2 = dot(k, k);
            if k2 > 0.0 {
                C64::new(4.0 * PI / k2, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(RealScalarField { grid: self.grid, values: self.inverse_real(s) })
    }

    /// Removes the content of bins whose resolved wavevector vanishes (the
    /// mean and the all-Nyquist corners). This is the part of a source that
    /// `solve_coulomb` assigns to the neutralizing background.
    pub fn resolved_part(&self, f: &RealScalarField) -> Result<RealScalarField> {
        self.grid.check_same(&f.grid)?;
        let mut s = self.forward_real(&f.values);
        self.apply_multiplier(&mut s, |k| C64::new(if dot(k, k) > 0.0 { 1.0 } else { 0.0 }, 0.0));
        Ok(RealScalarField { grid: self.grid, values: self.inverse_real(s) })
    }

    fn keep_mask(&self) -> [Vec<bool>; 3] {
        let n = self.grid.shape();
        [0, 1, 2].map(|a| {
            (0..n[a])
                .map(|i| 3 * self.grid.mode_number(a, i).unsigned_abs() < n[a] as u64)
                .collect()
        })
    }

    fn truncate_spectrum(&self, spec: &mut [C64]) {
        let mask = self.keep_mask();
        let [nx, ny, nz] = self.grid.shape();
        let mut idx = 0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if !(mask[0][i] && mask[1][j] && mask[2][k]) {
                        spec[idx] = C64::new(0.0, 0.0);
                    }
                    idx += 1;
                }
            }
        }
    }

    /// 2/3-rule truncation of a real product field; identity unless
    /// dealiasing is enabled.
    pub fn filter(&self, values: Vec<f64>) -> Vec<f64> {
        if !self.dealias {
            return values;
        }
        let mut s = self.forward_real(&values);
        self.truncate_spectrum(&mut s);
        self.inverse_real(s)
    }

    pub fn filter_complex(&self, values: Vec<C64>) -> Vec<C64> {
        if !self.dealias {
            return values;
        }
        let mut s = self.forward_complex(&values);
        self.truncate_spectrum(&mut s);
        self.inverse_complex(s)
    }
}

#[inline]
pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
