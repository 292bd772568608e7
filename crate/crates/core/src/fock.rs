//! Truncated electron ⊗ photon occupation-number basis.
//!
//! Electron orbitals are plane waves on the same k-lattice as the photon
//! modes. A basis state is a sorted list of occupied orbitals together with
//! a photon occupation vector over slots `2·mode + λ`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::modes::{lattice_points, ModeSet};

/// Sector cutoffs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorParams {
    /// Largest occupation of one (mode, polarization) slot.
    pub n_max: u8,
    /// Largest total photon number.
    pub n_ph_max: u32,
    pub k_cutoff: f64,
    pub n_electrons: usize,
    /// Keep only states with this total lattice momentum Σk + Σq·n.
    pub total_momentum: Option<[i32; 3]>,
    /// Refuse to enumerate more states than this.
    pub dimension_cap: usize,
}

impl Default for SectorParams {
    fn default() -> Self {
        Self { n_max: 2, n_ph_max: 2, k_cutoff: 1.0, n_electrons: 1, total_momentum: None, dimension_cap: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Clone, Debug)]
pub struct FockSector {
    params: SectorParams,
    box_length: f64,
    orbitals: Vec<[i32; 3]>,
    mode_lattice: Vec<[i32; 3]>,
    slots: usize,
    electrons: Vec<[u32; 2]>,
    photons: Vec<u8>,
    lookup: HashMap<Vec<u8>, usize>,
}

fn add3(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// All occupation vectors with entries ≤ n_max and sum ≤ n_total, in colex
/// order (last slot most significant).
fn compositions(slots: usize, n_max: u8, n_total: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; slots];
    fn rec(pos: usize, left: u32, n_max: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos == 0 {
            out.push(cur.clone());
            return;
        }
        let s = pos - 1;
        for n in 0..=(n_max as u32).min(left) {
            cur[s] = n as u8;
            rec(s, left - n, n_max, cur, out);
        }
        cur[s] = 0;
    }
    rec(slots, n_total, n_max, &mut cur, &mut out);
    out
}

/// Removes `orb` from the sorted configuration. The sign is (-1)^p with p the
/// number of occupied orbitals ordered before it.
pub fn annihilate_electron(config: &[u32], orb: u32) -> Option<(f64, Vec<u32>)> {
    let p = config.iter().position(|&o| o == orb)?;
    let mut out = config.to_vec();
    out.remove(p);
    Some((if p % 2 == 0 { 1.0 } else { -1.0 }, out))
}

/// Inserts `orb` into the sorted configuration; `None` if already occupied.
pub fn create_electron(config: &[u32], orb: u32) -> Option<(f64, Vec<u32>)> {
    if config.contains(&orb) {
        return None;
    }
    let p = config.iter().filter(|&&o| o < orb).count();
    let mut out = config.to_vec();
    out.insert(p, orb);
    Some((if p % 2 == 0 { 1.0 } else { -1.0 }, out))
}

/// Enumerates the sector for `modes` under `params`.
pub fn enumerate_sector(modes: &ModeSet, params: SectorParams) -> Result<FockSector> {
    if params.n_electrons == 0 || params.n_electrons > 2 {
        return Err(Error::UnsupportedElectronCount(params.n_electrons));
    }
    if !(params.k_cutoff >= 0.0) {
        return Err(Error::InvalidSector(format!("k_cutoff must be non-negative, got {}", params.k_cutoff)));
    }
    let l = modes.box_length();
    let orbitals = lattice_points(l, params.k_cutoff, true);
    let n_orb = orbitals.len();
    if n_orb < params.n_electrons {
        return Err(Error::InvalidSector(format!(
            "{} orbitals cannot hold {} electrons",
            n_orb, params.n_electrons
        )));
    }
    let mode_lattice: Vec<[i32; 3]> = modes.modes().iter().map(|m| m.lattice).collect();
    let slots = modes.slots();
    let comps = compositions(slots, params.n_max, params.n_ph_max);
    let comp_momentum = |c: &[u8]| {
        let mut p = [0i32; 3];
        for (s, &n) in c.iter().enumerate() {
            let q = mode_lattice[s / 2];
            for a in 0..3 {
                p[a] += q[a] * n as i32;
            }
        }
        p
    };

    let configs: Vec<[u32; 2]> = if params.n_electrons == 1 {
        (0..n_orb as u32).map(|i| [i, u32::MAX]).collect()
    } else {
        let mut v = Vec::new();
        for i in 0..n_orb as u32 {
            for j in i + 1..n_orb as u32 {
                v.push([i, j]);
            }
        }
        v
    };
    let config_momentum = |c: &[u32; 2]| {
        let mut p = orbitals[c[0] as usize];
        if params.n_electrons == 2 {
            p = add3(p, orbitals[c[1] as usize]);
        }
        p
    };

    // pairs (config index, composition index) in basis order
    let pairs: Vec<(usize, usize)> = match params.total_momentum {
        None => {
            let dim = configs.len().saturating_mul(comps.len());
            if dim > params.dimension_cap {
                return Err(Error::DimensionCap { dimension: dim, cap: params.dimension_cap });
            }
            (0..configs.len()).flat_map(|c| (0..comps.len()).map(move |p| (c, p))).collect()
        }
        Some(target) => {
            let mut by_momentum: HashMap<[i32; 3], Vec<usize>> = HashMap::new();
            for (i, c) in comps.iter().enumerate() {
                by_momentum.entry(comp_momentum(c)).or_default().push(i);
            }
            let mut dim = 0usize;
            for c in &configs {
                let need = add3(target, config_momentum(c).map(|x| -x));
                dim += by_momentum.get(&need).map_or(0, |v| v.len());
            }
            if dim > params.dimension_cap {
                return Err(Error::DimensionCap { dimension: dim, cap: params.dimension_cap });
            }
            let mut v = Vec::with_capacity(dim);
            for (ci, c) in configs.iter().enumerate() {
                let need = add3(target, config_momentum(c).map(|x| -x));
                if let Some(list) = by_momentum.get(&need) {
                    v.extend(list.iter().map(|&p| (ci, p)));
                }
            }
            v
        }
    };

    let mut electrons = Vec::with_capacity(pairs.len());
    let mut photons = Vec::with_capacity(pairs.len() * slots);
    let mut lookup = HashMap::with_capacity(pairs.len());
    for (idx, &(ci, pi)) in pairs.iter().enumerate() {
        electrons.push(configs[ci]);
        photons.extend_from_slice(&comps[pi]);
        lookup.insert(state_key(&configs[ci][..params.n_electrons], &comps[pi]), idx);
    }
    Ok(FockSector { params, box_length: l, orbitals, mode_lattice, slots, electrons, photons, lookup })
}

fn state_key(electrons: &[u32], photons: &[u8]) -> Vec<u8> {
    let mut k = Vec::with_capacity(4 * electrons.len() + photons.len());
    for e in electrons {
        k.extend_from_slice(&e.to_le_bytes());
    }
    k.extend_from_slice(photons);
    k
}

impl FockSector {
    pub fn params(&self) -> &SectorParams {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.electrons.len()
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Lattice vectors m (k = 2πm/L) of the electron orbitals.
    pub fn orbitals(&self) -> &[[i32; 3]] {
        &self.orbitals
    }

    pub fn orbital_index(&self, m: [i32; 3]) -> Option<u32> {
        // orbitals are few; a scan keeps the sector small
        self.orbitals.iter().position(|&o| o == m).map(|i| i as u32)
    }

    pub fn orbital_wavevector(&self, orb: u32) -> [f64; 3] {
        let u = 2.0 * PI / self.box_length;
        self.orbitals[orb as usize].map(|x| u * x as f64)
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn mode_lattice(&self) -> &[[i32; 3]] {
        &self.mode_lattice
    }

    pub fn electrons(&self, state: usize) -> &[u32] {
        &self.electrons[state][..self.params.n_electrons]
    }

    pub fn photons(&self, state: usize) -> &[u8] {
        &self.photons[state * self.slots..(state + 1) * self.slots]
    }

    pub fn index_of(&self, electrons: &[u32], photons: &[u8]) -> Option<usize> {
        self.lookup.get(&state_key(electrons, photons)).copied()
    }

    /// Total lattice momentum Σm_electron + Σn·m_photon of a basis state.
    pub fn total_momentum(&self, state: usize) -> [i32; 3] {
        let mut p = [0i32; 3];
        for &e in self.electrons(state) {
            p = add3(p, self.orbitals[e as usize]);
        }
        for (s, &n) in self.photons(state).iter().enumerate() {
            let q = self.mode_lattice[s / 2];
            for a in 0..3 {
                p[a] += q[a] * n as i32;
            }
        }
        p
    }

    /// Whether a photon occupation vector lies inside the cutoffs.
    pub fn photons_allowed(&self, photons: &[u8]) -> bool {
        photons.iter().all(|&n| n <= self.params.n_max)
            && photons.iter().map(|&n| n as u32).sum::<u32>() <= self.params.n_ph_max
    }

    /// Applies b or b† for slot (mode, λ) to `vector`. States pushed outside
    /// the truncated space are dropped.
    pub fn apply_ladder(&self, vector: &[C64], mode: usize, lambda: usize, kind: Ladder) -> Result<Vec<C64>> {
        if mode >= self.mode_lattice.len() || lambda > 1 {
            return Err(Error::UnknownMode(2 * mode + lambda));
        }
        if vector.len() != self.dimension() {
            return Err(Error::VectorLength { expected: self.dimension(), got: vector.len() });
        }
        let slot = 2 * mode + lambda;
        let mut out = vec![C64::new(0.0, 0.0); vector.len()];
        let mut ph = vec![0u8; self.slots];
        for (i, &x) in vector.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            ph.copy_from_slice(self.photons(i));
            let n = ph[slot];
            let amp = match kind {
                Ladder::Annihilate => {
                    if n == 0 {
                        continue;
                    }
                    ph[slot] = n - 1;
                    (n as f64).sqrt()
                }
                Ladder::Create => {
                    ph[slot] = n + 1;
                    if !self.photons_allowed(&ph) {
                        continue;
                    }
                    (n as f64 + 1.0).sqrt()
                }
            };
            if let Some(j) = self.index_of(self.electrons(i), &ph) {
                out[j] += x * amp;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::build_modes;

    fn unit_modes() -> ModeSet {
        build_modes(2.0 * PI, 1.0).unwrap()
    }

    #[test]
    fn composition_counts() {
        // 12 slots, n_max 2, total ≤ 2: 1 + 12 + (12 + 66)
        assert_eq!(compositions(12, 2, 2).len(), 91);
        assert_eq!(compositions(12, 1, 2).len(), 1 + 12 + 66);
        assert_eq!(compositions(4, 1, 1).len(), 5);
        let c = compositions(3, 2, 6);
        assert_eq!(c.len(), 27);
        // colex: last slot most significant
        for w in c.windows(2) {
            let a: Vec<_> = w[0].iter().rev().collect();
            let b: Vec<_> = w[1].iter().rev().collect();
            assert!(a < b);
        }
    }

    #[test]
    fn single_orbital_dimension() {
        let ms = unit_modes();
        let p = SectorParams { n_max: 1, n_ph_max: 1, k_cutoff: 0.0, ..Default::default() };
        let s = enumerate_sector(&ms, p).unwrap();
        assert_eq!(s.dimension(), 1 + ms.slots());
    }

    #[test]
    fn pair_count_without_photons() {
        let ms = unit_modes();
        let p = SectorParams { n_max: 1, n_ph_max: 0, k_cutoff: 1.5, n_electrons: 2, ..Default::default() };
        let s = enumerate_sector(&ms, p).unwrap();
        let m = s.orbitals().len();
        assert_eq!(m, 19);
        assert_eq!(s.dimension(), m * (m - 1) / 2);
    }

    #[test]
    fn momentum_blocks_partition() {
        let ms = unit_modes();
        let base = SectorParams { n_max: 2, n_ph_max: 2, k_cutoff: 1.0, n_electrons: 2, ..Default::default() };
        let full = enumerate_sector(&ms, base).unwrap();
        let mut blocks: HashMap<[i32; 3], usize> = HashMap::new();
        for i in 0..full.dimension() {
            *blocks.entry(full.total_momentum(i)).or_default() += 1;
        }
        let mut total = 0;
        for (k, n) in blocks {
            let s = enumerate_sector(&ms, SectorParams { total_momentum: Some(k), ..base }).unwrap();
            assert_eq!(s.dimension(), n);
            assert!((0..s.dimension()).all(|i| s.total_momentum(i) == k));
            total += n;
        }
        assert_eq!(total, full.dimension());
    }

    #[test]
    fn index_map_is_bijective() {
        let ms = unit_modes();
        let s = enumerate_sector(&ms, SectorParams { n_electrons: 2, ..Default::default() }).unwrap();
        for i in 0..s.dimension() {
            assert_eq!(s.index_of(s.electrons(i), s.photons(i)), Some(i));
        }
    }

    #[test]
    fn dimension_cap_reports_size() {
        let ms = unit_modes();
        let p = SectorParams { dimension_cap: 10, ..Default::default() };
        match enumerate_sector(&ms, p) {
            Err(Error::DimensionCap { dimension, cap }) => assert_eq!((dimension, cap), (7 * 91, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_electrons_rejected() {
        let p = SectorParams { n_electrons: 3, ..Default::default() };
        assert!(matches!(enumerate_sector(&unit_modes(), p), Err(Error::UnsupportedElectronCount(3))));
    }

    #[test]
    fn ladder_on_vacuum_and_top() {
        let ms = unit_modes();
        let p = SectorParams { n_max: 2, n_ph_max: 3, k_cutoff: 0.0, ..Default::default() };
        let s = enumerate_sector(&ms, p).unwrap();
        let vac = s.index_of(&[0], &vec![0; s.slots()]).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); s.dimension()];
        v[vac] = C64::new(1.0, 0.0);
        let a = s.apply_ladder(&v, 3, 1, Ladder::Annihilate).unwrap();
        assert!(a.iter().all(|z| z.norm() == 0.0));
        let one = s.apply_ladder(&v, 3, 1, Ladder::Create).unwrap();
        let two = s.apply_ladder(&one, 3, 1, Ladder::Create).unwrap();
        let three = s.apply_ladder(&two, 3, 1, Ladder::Create).unwrap();
        assert!(three.iter().all(|z| z.norm() == 0.0));
        let back = s.apply_ladder(&two, 3, 1, Ladder::Annihilate).unwrap();
        for (x, y) in back.iter().zip(&one) {
            assert!((x - y * 2.0).norm() < 1e-15);
        }
        assert!(s.apply_ladder(&v, 6, 0, Ladder::Create).is_err());
    }

    #[test]
    fn fermion_signs() {
        assert_eq!(create_electron(&[1, 4], 2), Some((-1.0, vec![1, 2, 4])));
        assert_eq!(create_electron(&[1, 4], 0), Some((1.0, vec![0, 1, 4])));
        assert_eq!(create_electron(&[1, 4], 4), None);
        assert_eq!(annihilate_electron(&[1, 4], 4), Some((-1.0, vec![1])));
        assert_eq!(annihilate_electron(&[1, 4], 3), None);
    }
}
