//! Photon wavevectors on the periodic lattice and their transverse
//! polarization vectors.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One photon wavevector q = 2πm/L with two real polarization unit vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonMode {
    pub lattice: [i32; 3],
    pub q: [f64; 3],
    pub polarizations: [[f64; 3]; 2],
}

impl PhotonMode {
    pub fn magnitude(&self) -> f64 {
        norm(self.q)
    }

    /// ω = c|q|.
    pub fn omega(&self, c: f64) -> f64 {
        c * self.magnitude()
    }
}

/// All nonzero lattice wavevectors with |q| ≤ q_cutoff. Modes come in ±q
/// pairs stored adjacently: the lexicographically positive representative at
/// an even index, its partner right after it.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    box_length: f64,
    q_cutoff: f64,
    modes: Vec<PhotonMode>,
    lookup: HashMap<[i32; 3], usize>,
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = norm(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn lex_positive(m: [i32; 3]) -> bool {
    m.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// e1 = q×ẑ/|q×ẑ| (x̂ when q ∥ ẑ), e2 = q×e1/|q×e1|.
fn polarization_basis(q: [f64; 3]) -> [[f64; 3]; 2] {
    let qz = cross(q, [0.0, 0.0, 1.0]);
    let e1 = if norm(qz) < 1e-12 * norm(q) { [1.0, 0.0, 0.0] } else { normalized(qz) };
    let e2 = normalized(cross(q, e1));
    [e1, e2]
}

/// Integer lattice points m ≠ 0 with 2π|m|/L ≤ cutoff, ordered by |m|² then
/// lexicographically.
pub(crate) fn lattice_points(box_length: f64, cutoff: f64, include_zero: bool) -> Vec<[i32; 3]> {
    let unit = 2.0 * PI / box_length;
    let r = (cutoff / unit * (1.0 + 1e-12)).floor() as i32;
    let r2 = (cutoff / unit) * (cutoff / unit) * (1.0 + 1e-12);
    let mut pts = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                let m2 = (x * x + y * y + z * z) as f64;
                if m2 <= r2 && (include_zero || m2 > 0.0) {
                    pts.push([x, y, z]);
                }
            }
        }
    }
    pts.sort_by_key(|m| (m[0] * m[0] + m[1] * m[1] + m[2] * m[2], *m));
    pts
}

/// Builds the mode set for box length `box_length` and cutoff `q_cutoff`.
pub fn build_modes(box_length: f64, q_cutoff: f64) -> Result<ModeSet> {
    let smallest = 2.0 * PI / box_length;
    if !(box_length > 0.0) || !(q_cutoff >= smallest * (1.0 - 1e-12)) {
        return Err(Error::EmptyModeSet { cutoff: q_cutoff, smallest });
    }
    let unit = 2.0 * PI / box_length;
    let mut modes = Vec::new();
    for m in lattice_points(box_length, q_cutoff, false).into_iter().filter(|m| lex_positive(*m)) {
        let q = [unit * m[0] as f64, unit * m[1] as f64, unit * m[2] as f64];
        let pol = polarization_basis(q);
        modes.push(PhotonMode { lattice: m, q, polarizations: pol });
        let neg = [-m[0], -m[1], -m[2]];
        let nq = [unit * neg[0] as f64, unit * neg[1] as f64, unit * neg[2] as f64];
        modes.push(PhotonMode { lattice: neg, q: nq, polarizations: pol });
    }
    Ok(ModeSet::from_modes(box_length, q_cutoff, modes))
}

impl ModeSet {
    fn from_modes(box_length: f64, q_cutoff: f64, modes: Vec<PhotonMode>) -> Self {
        let lookup = modes.iter().enumerate().map(|(i, m)| (m.lattice, i)).collect();
        Self { box_length, q_cutoff, modes, lookup }
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn q_cutoff(&self) -> f64 {
        self.q_cutoff
    }

    pub fn modes(&self) -> &[PhotonMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Number of (mode, polarization) slots.
    pub fn slots(&self) -> usize {
        2 * self.modes.len()
    }

    pub fn index_of(&self, lattice: [i32; 3]) -> Option<usize> {
        self.lookup.get(&lattice).copied()
    }

    /// Index of the -q partner of mode `i`.
    pub fn partner(&self, i: usize) -> usize {
        i ^ 1
    }

    /// Rotates (e1, e2) → (e1 cosθ + e2 sinθ, -e1 sinθ + e2 cosθ) for the ±q
    /// pair `p` (modes 2p and 2p+1) by `angle(p)`.
    pub fn rotated_polarizations(&self, angle: impl Fn(usize) -> f64) -> ModeSet {
        let mut modes = self.modes.clone();
        for (i, m) in modes.iter_mut().enumerate() {
            let (s, c) = angle(i / 2).sin_cos();
            let [e1, e2] = m.polarizations;
            let r1 = [0, 1, 2].map(|a| e1[a] * c + e2[a] * s);
            let r2 = [0, 1, 2].map(|a| -e1[a] * s + e2[a] * c);
            m.polarizations = [r1, r2];
        }
        ModeSet::from_modes(self.box_length, self.q_cutoff, modes)
    }

    /// Largest violation of transversality, orthonormality and e(q) = e(-q).
    pub fn max_constraint_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, m) in self.modes.iter().enumerate() {
            let qn = m.magnitude();
            let [e1, e2] = m.polarizations;
            let d = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            worst = worst
                .max(d(m.q, e1).abs() / qn)
                .max(d(m.q, e2).abs() / qn)
                .max((d(e1, e1) - 1.0).abs())
                .max((d(e2, e2) - 1.0).abs())
                .max(d(e1, e2).abs());
            let p = &self.modes[self.partner(i)];
            let neg = [-m.lattice[0], -m.lattice[1], -m.lattice[2]];
            if p.lattice != neg {
                return f64::INFINITY;
            }
            for l in 0..2 {
                for a in 0..3 {
                    worst = worst.max((p.polarizations[l][a] - m.polarizations[l][a]).abs());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box_has_six_axis_modes() {
        let ms = build_modes(2.0 * PI, 1.0).unwrap();
        assert_eq!(ms.len(), 6);
        let mut lat: Vec<_> = ms.modes().iter().map(|m| m.lattice).collect();
        lat.sort();
        assert_eq!(lat, vec![[-1, 0, 0], [0, -1, 0], [0, 0, -1], [0, 0, 1], [0, 1, 0], [1, 0, 0]]);
        for m in ms.modes() {
            assert!((m.magnitude() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lattice_count_matches_brute_force() {
        // points of Z³\{0} in a ball of radius 2 (in units of 2π/L): 6 + 12 + 8 + 6 = 32
        let ms = build_modes(1.0, 2.0 * 2.0 * PI).unwrap();
        assert_eq!(ms.len(), 32);
    }

    #[test]
    fn polarization_constraints_hold() {
        let ms = build_modes(3.0, 4.0 * 2.0 * PI / 3.0).unwrap();
        assert!(ms.max_constraint_violation() < 1e-14);
        for m in ms.modes() {
            let [e1, e2] = m.polarizations;
            let t: f64 = (0..3).map(|a| m.q[a] * e1[a]).sum::<f64>().abs()
                + (0..3).map(|a| m.q[a] * e2[a]).sum::<f64>().abs();
            assert!(t <= 1e-14 * m.magnitude());
        }
        for i in 0..ms.len() {
            assert_eq!(ms.modes()[i].polarizations, ms.modes()[ms.partner(i)].polarizations);
        }
    }

    #[test]
    fn z_axis_tie_break() {
        let ms = build_modes(2.0 * PI, 1.0).unwrap();
        let z = &ms.modes()[ms.index_of([0, 0, 1]).unwrap()];
        assert_eq!(z.polarizations[0], [1.0, 0.0, 0.0]);
    }

    #[test]
    fn cutoff_below_lattice_rejected() {
        assert!(matches!(build_modes(2.0 * PI, 0.5), Err(Error::EmptyModeSet { .. })));
    }

    #[test]
    fn rotation_keeps_constraints() {
        let ms = build_modes(2.0, 2.0 * 2.0 * PI / 2.0).unwrap();
        let r = ms.rotated_polarizations(|p| 0.3 + p as f64);
        assert!(r.max_constraint_violation() < 1e-14);
    }
}
