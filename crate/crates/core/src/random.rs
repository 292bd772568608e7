//! Seeded band-limited random fields for invariant checks.
//!
//! A field is band-limited to `max_mode` when every Fourier coefficient with
//! |m_axis| > max_mode on some axis vanishes. Keeping `max_mode` below n/6
//! leaves room for cubic products without aliasing.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{ComplexScalarField, Grid3, RealScalarField, RealVectorField};
use crate::spectral::Spectral;

/// Coefficients are drawn mode by mode in a fixed order, so a seed describes
/// the same trigonometric polynomial on every grid that resolves it.
fn random_spectrum(grid: Grid3, max_mode: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let [nx, ny, _] = grid.shape();
    let m = max_mode as i64;
    let mut spec = vec![C64::new(0.0, 0.0); grid.len()];
    for mz in -m..=m {
        for my in -m..=m {
            for mx in -m..=m {
                let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let bins = (grid.bin_of_mode(0, mx), grid.bin_of_mode(1, my), grid.bin_of_mode(2, mz));
                if let (Some(i), Some(j), Some(k)) = bins {
                    spec[i + nx * (j + ny * k)] = c;
                }
            }
        }
    }
    spec
}

pub fn band_limited_complex(grid: Grid3, max_mode: usize, seed: u64) -> ComplexScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sp = Spectral::new(grid);
    let values = sp.inverse_complex(random_spectrum(grid, max_mode, &mut rng));
    let mut f = ComplexScalarField { grid, values };
    f.normalize();
    f
}

/// Real band-limited field scaled to unit root-mean-square.
pub fn band_limited_real(grid: Grid3, max_mode: usize, seed: u64) -> RealScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sp = Spectral::new(grid);
    let mut values = sp.inverse_real(random_spectrum(grid, max_mode, &mut rng));
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt();
    if rms > 0.0 {
        values.iter_mut().for_each(|v| *v /= rms);
    }
    RealScalarField { grid, values }
}

pub fn band_limited_vector(grid: Grid3, max_mode: usize, seed: u64) -> RealVectorField {
    let c = [0, 1, 2].map(|a| band_limited_real(grid, max_mode, seed.wrapping_mul(31).wrapping_add(a)).values);
    RealVectorField { grid, components: c }
}

/// Random divergence-free field with zero mean.
pub fn band_limited_transverse(grid: Grid3, max_mode: usize, seed: u64) -> RealVectorField {
    let sp = Spectral::new(grid);
    sp.transverse_source(&band_limited_vector(grid, max_mode, seed)).expect("same grid")
}
