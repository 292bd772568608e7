//! Lowest eigenpairs of a sparse Hamiltonian, with dense and perturbative
//! oracles.
//!
//! The Lanczos driver finds one eigenpair per Krylov run: it builds a fully
//! reorthogonalized basis in the complement of the already locked vectors,
//! accepts the lowest Ritz pair once its residual is small, locks it and
//! restarts. Degenerate eigenvalues are therefore found with their
//! multiplicity.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub n_eigs: usize,
    /// Accept when ‖Hv - λv‖ ≤ tol·‖H‖₁.
    pub tol: f64,
    /// Largest Krylov dimension per eigenpair.
    pub max_iter: usize,
    pub seed: u64,
    pub want_vectors: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { n_eigs: 1, tol: 1e-12, max_iter: 500, seed: 0, want_vectors: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LanczosResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<C64>>>,
    /// ‖Hv - λv‖ for each returned pair.
    pub residuals: Vec<f64>,
    /// Total number of matrix-vector products.
    pub iterations: usize,
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components along each vector of `basis` (assumed orthonormal),
/// twice.
fn orthogonalize(w: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn start_vector(dim: usize, seed: u64, run: usize, locked: &[Vec<C64>]) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    let mut v: Vec<C64> = (0..dim).map(|_| C64::new(1.0 + 0.25 * rng.gen_range(-1.0..1.0), 0.0)).collect();
    orthogonalize(&mut v, locked);
    let n = norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

/// Lowest eigenvalue and its eigenvector of the symmetric tridiagonal matrix.
fn lowest_tridiagonal(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(idx).iter().copied().collect())
}

struct Run {
    value: f64,
    vector: Vec<C64>,
    residual: f64,
    matvecs: usize,
}

/// One Krylov run in the complement of `locked`. `history` receives the
/// lowest Ritz value after every step when present.
fn krylov_run(
    h: &SparseHamiltonian,
    locked: &[Vec<C64>],
    start: Vec<C64>,
    tol_abs: f64,
    max_iter: usize,
    mut history: Option<&mut Vec<f64>>,
) -> Result<std::result::Result<Run, f64>> {
    let limit = max_iter.min(h.dimension() - locked.len()).max(1);
    let breakdown = 1e-14 * h.norm_one().max(f64::MIN_POSITIVE);
    let mut basis = vec![start];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;
    for m in 1..=limit {
        let v = &basis[m - 1];
        let mut w = h.matvec(v)?;
        let a = inner(v, &w).re;
        alpha.push(a);
        for (x, y) in w.iter_mut().zip(v) {
            *x -= a * y;
        }
        if m >= 2 {
            let b = beta[m - 2];
            for (x, y) in w.iter_mut().zip(&basis[m - 2]) {
                *x -= b * y;
            }
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        let exhausted = b < breakdown || m == limit;
        if history.is_none() && !exhausted && m > 40 && m % 5 != 0 {
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
            continue;
        }
        let (theta, s) = lowest_tridiagonal(&alpha, &beta);
        if let Some(hist) = history.as_deref_mut() {
            hist.push(theta);
        }
        let estimate = b * s[m - 1].abs();
        best = best.min(estimate);
        if estimate <= tol_abs || exhausted {
            let mut y = vec![C64::new(0.0, 0.0); h.dimension()];
            for (c, vb) in s.iter().zip(&basis) {
                for (x, z) in y.iter_mut().zip(vb) {
                    *x += c * z;
                }
            }
            orthogonalize(&mut y, locked);
            let n = norm(&y);
            y.iter_mut().for_each(|z| *z /= n);
            let hy = h.matvec(&y)?;
            let value = inner(&y, &hy).re;
            let residual = norm(&hy.iter().zip(&y).map(|(p, q)| p - value * q).collect::<Vec<_>>());
            best = best.min(residual);
            if residual <= tol_abs {
                return Ok(Ok(Run { value, vector: y, residual, matvecs: m + 1 }));
            }
            if b < breakdown {
                return Ok(Err(best));
            }
        }
        if m < limit {
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
    }
    Ok(Err(best))
}

/// Lowest `n_eigs` eigenvalues of `h`.
pub fn lanczos(h: &SparseHamiltonian, opts: &LanczosOptions) -> Result<LanczosResult> {
    let dim = h.dimension();
    if opts.n_eigs == 0 || opts.n_eigs > dim {
        return Err(Error::InvalidEigenRequest(format!("n_eigs = {} with dimension {}", opts.n_eigs, dim)));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidEigenRequest(format!("tol = {}, max_iter = {}", opts.tol, opts.max_iter)));
    }
    let tol_abs = opts.tol * h.norm_one();
    let mut pairs: Vec<(f64, Vec<C64>, f64)> = Vec::new();
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut iterations = 0;
    for run in 0..opts.n_eigs {
        let start = start_vector(dim, opts.seed, run, &locked);
        match krylov_run(h, &locked, start, tol_abs, opts.max_iter, None)? {
            Ok(r) => {
                iterations += r.matvecs;
                locked.push(r.vector.clone());
                pairs.push((r.value, r.vector, r.residual));
            }
            Err(best) => {
                let mut residuals: Vec<f64> = pairs.iter().map(|p| p.2).collect();
                residuals.push(best);
                return Err(Error::NoConvergence { max_iter: opts.max_iter, residuals });
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(LanczosResult {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        eigenvectors: opts.want_vectors.then(|| pairs.into_iter().map(|p| p.1).collect()),
        iterations,
    })
}

/// Lowest Ritz value after each of the first `steps` Lanczos steps from the
/// seeded start vector.
pub fn ritz_history(h: &SparseHamiltonian, steps: usize, seed: u64) -> Result<Vec<f64>> {
    let mut hist = Vec::new();
    let start = start_vector(h.dimension(), seed, 0, &[]);
    // tolerance 0 never accepts early; the run always fills the history
    let _ = krylov_run(h, &[], start, 0.0, steps, Some(&mut hist))?;
    Ok(hist)
}

/// Dense Hermitian matrix of `h`.
pub fn to_dense(h: &SparseHamiltonian) -> DMatrix<C64> {
    let n = h.dimension();
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for &(j, v) in h.row(i) {
            m[(i, j)] = v;
        }
    }
    m
}

/// All eigenvalues of `h` in ascending order by dense diagonalization.
pub fn dense_eigenvalues(h: &SparseHamiltonian) -> Vec<f64> {
    let eig = SymmetricEigen::new(to_dense(h));
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Rayleigh-Schrödinger second-order shift Σ_{m≠s}|V_ms|²/(E_s - E_m) of
/// state `s` with unperturbed energies `h0_diag`.
pub fn second_order_shift(h0_diag: &[f64], v: &SparseHamiltonian, s: usize) -> Result<f64> {
    if h0_diag.len() != v.dimension() {
        return Err(Error::VectorLength { expected: v.dimension(), got: h0_diag.len() });
    }
    if s >= h0_diag.len() {
        return Err(Error::InvalidEigenRequest(format!("state {s} outside dimension {}", h0_diag.len())));
    }
    let es = h0_diag[s];
    let mut shift = 0.0;
    for &(m, vms) in v.row(s) {
        if m == s || vms.norm() == 0.0 {
            continue;
        }
        let gap = es - h0_diag[m];
        if gap.abs() < 1e-12 {
            return Err(Error::Degenerate { state: m, gap, coupling: vms.norm() });
        }
        shift += vms.norm_sqr() / gap;
    }
    Ok(shift)
}
