//! Periodic cubic grids and the field containers that live on them.
//!
//! Samples are stored with x varying fastest and z slowest. Every quadrature
//! in the crate uses the plain rectangle rule `dV * sum`, summed in storage
//! order, so results do not depend on thread count.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Periodic box `[0, L)^3` sampled on `n[0] x n[1] x n[2]` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid3 {
    n: [usize; 3],
    box_length: f64,
}

impl Grid3 {
    pub fn new(n: [usize; 3], box_length: f64) -> Result<Self> {
        for (axis, &na) in n.iter().enumerate() {
            if na < 4 || na % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} has {na} points; need an even count >= 4"
                )));
            }
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidGrid(format!("box length {box_length} must be positive")));
        }
        Ok(Self { n, box_length })
    }

    pub fn cubic(n: usize, box_length: f64) -> Result<Self> {
        Self::new([n, n, n], box_length)
    }

    pub fn shape(&self) -> [usize; 3] {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Box volume Ω = L³.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.box_length / self.n[axis] as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    /// Position of node `(i, j, k)`.
    pub fn position(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            i as f64 * self.spacing(0),
            j as f64 * self.spacing(1),
            k as f64 * self.spacing(2),
        ]
    }

    /// Iterates node positions in storage order.
    pub fn positions(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let [nx, ny, nz] = self.n;
        (0..nz).flat_map(move |k| {
            (0..ny).flat_map(move |j| (0..nx).map(move |i| self.position(i, j, k)))
        })
    }

    /// Signed integer mode number of FFT bin `idx` along `axis`.
    /// Bins `0..n/2` map to `0..n/2`, the rest to negative numbers; the
    /// Nyquist bin maps to `-n/2`.
    #[inline]
    pub fn mode_number(&self, axis: usize, idx: usize) -> i64 {
        let n = self.n[axis];
        if idx < n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    /// FFT bin holding integer mode `m` along `axis`, if it is representable.
    pub fn bin_of_mode(&self, axis: usize, m: i64) -> Option<usize> {
        let n = self.n[axis] as i64;
        if m <= -n / 2 || m >= n / 2 {
            return None;
        }
        Some(m.rem_euclid(n) as usize)
    }

    /// Largest wavenumber an odd-order spectral derivative resolves: (n/2 - 1)·2π/L
    /// along the coarsest axis.
    pub fn max_resolved_wavenumber(&self) -> f64 {
        let nmin = *self.n.iter().min().unwrap();
        (nmin as f64 / 2.0 - 1.0) * 2.0 * std::f64::consts::PI / self.box_length
    }

    pub fn check_same(&self, other: &Grid3) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: *self, right: *other })
        }
    }
}

fn check_len(grid: &Grid3, len: usize) -> Result<()> {
    if grid.len() == len {
        Ok(())
    } else {
        Err(Error::SampleCount { expected: grid.len(), got: len })
    }
}

/// Complex scalar samples, e.g. the electron wave function ψ.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexScalarField {
    pub grid: Grid3,
    pub values: Vec<C64>,
}

/// Real scalar samples: ρ, V, χ, residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct RealScalarField {
    pub grid: Grid3,
    pub values: Vec<f64>,
}

/// Real 3-vector field stored component-major: A, Π, E, B, j.
#[derive(Clone, Debug, PartialEq)]
pub struct RealVectorField {
    pub grid: Grid3,
    pub components: [Vec<f64>; 3],
}

/// Complex 3-vector field, used for ∇ψ.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVectorField {
    pub grid: Grid3,
    pub components: [Vec<C64>; 3],
}

impl ComplexScalarField {
    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: Grid3, values: Vec<C64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> C64) -> Self {
        Self { grid, values: grid.positions().map(f).collect() }
    }

    /// ⟨self, other⟩ = ∫ conj(self)·other.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.grid.check_same(&other.grid)?;
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell_volume())
    }

    /// ∫|ψ|².
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|z| *z *= s);
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
    }

    pub fn axpy(&mut self, alpha: C64, x: &Self) -> Result<()> {
        self.grid.check_same(&x.grid)?;
        self.values.iter_mut().zip(&x.values).for_each(|(y, x)| *y += alpha * x);
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl RealScalarField {
    pub fn zeros(grid: Grid3) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self { grid, values: grid.positions().map(f).collect() }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
            * self.grid.cell_volume())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add_scaled(&mut self, alpha: f64, x: &Self) -> Result<()> {
        self.grid.check_same(&x.grid)?;
        self.values.iter_mut().zip(&x.values).for_each(|(y, x)| *y += alpha * x);
        Ok(())
    }
}

impl RealVectorField {
    pub fn zeros(grid: Grid3) -> Self {
        let n = grid.len();
        Self { grid, components: [vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }

    pub fn from_components(grid: Grid3, components: [Vec<f64>; 3]) -> Result<Self> {
        for c in &components {
            check_len(&grid, c.len())?;
        }
        Ok(Self { grid, components })
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for (idx, x) in grid.positions().enumerate() {
            let v = f(x);
            for a in 0..3 {
                out.components[a][idx] = v[a];
            }
        }
        out
    }

    /// Σ_a ∫ u_a v_a.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let mut s = 0.0;
        for a in 0..3 {
            s += self.components[a].iter().zip(&other.components[a]).map(|(x, y)| x * y).sum::<f64>();
        }
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self.components.iter().flat_map(|c| c.iter()).map(|v| v * v).sum();
        s * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flat_map(|c| c.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise Euclidean magnitude squared.
    pub fn magnitude_sqr(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum())
            .collect()
    }

    pub fn add_scaled(&mut self, alpha: f64, x: &Self) -> Result<()> {
        self.grid.check_same(&x.grid)?;
        for a in 0..3 {
            self.components[a].iter_mut().zip(&x.components[a]).for_each(|(y, x)| *y += alpha * x);
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.components.iter_mut().for_each(|c| c.iter_mut().for_each(|v| *v *= alpha));
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flat_map(|c| c.iter()).all(|v| v.is_finite())
    }
}

impl ComplexVectorField {
    pub fn zeros(grid: Grid3) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid, components: [z.clone(), z.clone(), z] }
    }

    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self.components.iter().flat_map(|c| c.iter()).map(|v| v.norm_sqr()).sum();
        s * self.grid.cell_volume()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_axes() {
        assert!(Grid3::new([5, 8, 8], 1.0).is_err());
        assert!(Grid3::new([2, 8, 8], 1.0).is_err());
        assert!(Grid3::cubic(8, 0.0).is_err());
        assert!(Grid3::cubic(8, -1.0).is_err());
        assert!(Grid3::cubic(4, 1.0).is_ok());
    }

    #[test]
    fn storage_order_is_x_fastest() {
        let g = Grid3::new([4, 6, 8], 2.0).unwrap();
        assert_eq!(g.index(1, 0, 0), 1);
        assert_eq!(g.index(0, 1, 0), 4);
        assert_eq!(g.index(0, 0, 1), 24);
        let p: Vec<_> = g.positions().take(2).collect();
        assert_eq!(p[1], [0.5, 0.0, 0.0]);
    }

    #[test]
    fn mode_numbers_close_under_negation() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.mode_number(0, i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for m in -3..=3 {
            assert!(g.bin_of_mode(0, m).is_some() && g.bin_of_mode(0, -m).is_some());
        }
        assert_eq!(g.bin_of_mode(0, 4), None);
    }

    #[test]
    fn sample_count_checked() {
        let g = Grid3::cubic(4, 1.0).unwrap();
        assert!(RealScalarField::from_values(g, vec![0.0; 63]).is_err());
        assert!(RealVectorField::from_components(g, [vec![0.0; 64], vec![0.0; 64], vec![0.0; 3]]).is_err());
    }
}
