//! Sparse normal-ordered H^QED on a Fock sector.
//!
//! Every builder generates the full column ⟨i|H|j⟩ for each basis state j,
//! merges duplicates in generation order and keeps the upper triangle.
//! Columns are independent so they are built in parallel; the result does
//! not depend on the number of workers.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{annihilate_electron, create_electron, FockSector, SectorParams};
use crate::modes::ModeSet;
use crate::sources::Constants;

/// Stored entries with |value| at or below this are dropped.
pub const DROP_TOLERANCE: f64 = 1e-16;

#[derive(Clone, Debug, PartialEq)]
pub struct SectorMetadata {
    pub params: SectorParams,
    pub constants: Constants,
    pub box_length: f64,
    pub q_cutoff: f64,
    /// FNV-1a hash of cutoffs, constants and the mode set.
    pub hash: u64,
}

#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    dimension: usize,
    /// Upper triangle (row ≤ col), sorted by (row, col).
    entries: Vec<(usize, usize, C64)>,
    metadata: SectorMetadata,
    hermiticity_defect: f64,
    rows: Vec<Vec<(usize, C64)>>,
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn bytes(&mut self, b: &[u8]) {
        for &x in b {
            self.0 ^= x as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn f64(&mut self, x: f64) {
        self.bytes(&x.to_bits().to_le_bytes());
    }

    fn i64(&mut self, x: i64) {
        self.bytes(&x.to_le_bytes());
    }
}

fn metadata(sector: &FockSector, modes: &ModeSet, k: &Constants) -> SectorMetadata {
    let p = *sector.params();
    let mut h = Fnv::new();
    h.i64(p.n_max as i64);
    h.i64(p.n_ph_max as i64);
    h.f64(p.k_cutoff);
    h.i64(p.n_electrons as i64);
    match p.total_momentum {
        Some(m) => m.iter().for_each(|&x| h.i64(x as i64)),
        None => h.i64(i64::MIN),
    }
    for x in [k.hbar, k.mass, k.charge, k.c, modes.box_length(), modes.q_cutoff()] {
        h.f64(x);
    }
    for m in modes.modes() {
        m.lattice.iter().for_each(|&x| h.i64(x as i64));
        m.polarizations.iter().flatten().for_each(|&x| h.f64(x));
    }
    SectorMetadata { params: p, constants: *k, box_length: modes.box_length(), q_cutoff: modes.q_cutoff(), hash: h.0 }
}

fn check_lattice(sector: &FockSector, modes: &ModeSet) -> Result<()> {
    if sector.box_length() != modes.box_length() {
        return Err(Error::LatticeMismatch(format!(
            "sector box length {} differs from mode box length {}",
            sector.box_length(),
            modes.box_length()
        )));
    }
    let same = sector.mode_lattice().len() == modes.len()
        && sector.mode_lattice().iter().zip(modes.modes()).all(|(a, m)| *a == m.lattice);
    if !same {
        return Err(Error::LatticeMismatch("sector was enumerated for a different mode set".into()));
    }
    Ok(())
}

fn assemble<F>(sector: &FockSector, meta: SectorMetadata, generate: F) -> SparseHamiltonian
where
    F: Fn(usize, &mut Vec<(usize, C64)>) + Sync,
{
    let dim = sector.dimension();
    let columns: Vec<Vec<(usize, C64)>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut raw = Vec::new();
            generate(j, &mut raw);
            let mut merged: BTreeMap<usize, C64> = BTreeMap::new();
            for (i, v) in raw {
                *merged.entry(i).or_insert(C64::new(0.0, 0.0)) += v;
            }
            merged.into_iter().filter(|(_, v)| v.norm() > DROP_TOLERANCE).collect()
        })
        .collect();
    let defect = hermiticity_defect(&columns);
    let mut entries: Vec<(usize, usize, C64)> = columns
        .iter()
        .enumerate()
        .flat_map(|(j, col)| col.iter().filter(move |(i, _)| *i <= j).map(move |&(i, v)| (i, j, v)))
        .collect();
    entries.sort_by_key(|&(r, c, _)| (r, c));
    SparseHamiltonian::from_upper(dim, entries, meta, defect)
}

fn hermiticity_defect(columns: &[Vec<(usize, C64)>]) -> f64 {
    let mut map: HashMap<(usize, usize), C64> = HashMap::new();
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            map.insert((i, j), v);
        }
    }
    map.iter()
        .map(|(&(i, j), v)| {
            let t = map.get(&(j, i)).copied().unwrap_or(C64::new(0.0, 0.0));
            (v - t.conj()).norm()
        })
        .fold(0.0, f64::max)
}

impl SparseHamiltonian {
    fn from_upper(dimension: usize, entries: Vec<(usize, usize, C64)>, metadata: SectorMetadata, defect: f64) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dimension];
        for &(r, c, v) in &entries {
            rows[r].push((c, v));
            if r != c {
                rows[c].push((r, v.conj()));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
        }
        Self { dimension, entries, metadata, hermiticity_defect: defect, rows }
    }

    /// Builds a matrix from upper-triangle triplets (row ≤ col), merging
    /// duplicates. The metadata is empty; meant for oracles and tests.
    pub fn from_triplets(dimension: usize, triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r > c || c >= dimension {
                return Err(Error::InvalidSector(format!("entry ({r}, {c}) outside the upper triangle of {dimension}")));
            }
            *merged.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let defect = merged.iter().filter(|((r, c), _)| r == c).map(|(_, v)| v.im.abs()).fold(0.0, f64::max);
        let entries = merged.into_iter().filter(|(_, v)| v.norm() > DROP_TOLERANCE).map(|((r, c), v)| (r, c, v)).collect();
        let meta = SectorMetadata {
            params: SectorParams::default(),
            constants: Constants::default(),
            box_length: 0.0,
            q_cutoff: 0.0,
            hash: 0,
        };
        Ok(Self::from_upper(dimension, entries, meta, defect))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn metadata(&self) -> &SectorMetadata {
        &self.metadata
    }

    /// max |H_ij - conj(H_ji)| over the generated (unsymmetrized) matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    /// Full row `i` (both triangles), sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, C64)] {
        &self.rows[i]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dimension];
        for &(r, c, v) in &self.entries {
            if r == c {
                d[r] = v.re;
            }
        }
        d
    }

    /// H minus its diagonal.
    pub fn off_diagonal(&self) -> SparseHamiltonian {
        let entries = self.entries.iter().copied().filter(|&(r, c, _)| r != c).collect();
        Self::from_upper(self.dimension, entries, self.metadata.clone(), self.hermiticity_defect)
    }

    /// Entrywise sum; metadata is taken from `self`.
    pub fn add(&self, other: &SparseHamiltonian) -> Result<SparseHamiltonian> {
        if self.dimension != other.dimension {
            return Err(Error::VectorLength { expected: self.dimension, got: other.dimension });
        }
        let mut merged: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for &(r, c, v) in self.entries.iter().chain(&other.entries) {
            *merged.entry((r, c)).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let entries = merged.into_iter().filter(|(_, v)| v.norm() > DROP_TOLERANCE).map(|((r, c), v)| (r, c, v)).collect();
        let defect = self.hermiticity_defect + other.hermiticity_defect;
        Ok(Self::from_upper(self.dimension, entries, self.metadata.clone(), defect))
    }

    /// y = Hx, rows in parallel, each row summed in column order.
    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dimension {
            return Err(Error::VectorLength { expected: self.dimension, got: x.len() });
        }
        Ok(self
            .rows
            .par_iter()
            .map(|row| row.iter().fold(C64::new(0.0, 0.0), |acc, &(c, v)| acc + v * x[c]))
            .collect())
    }

    /// max_j Σ_i |H_ij|.
    pub fn norm_one(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Writes `# dimension`, `# sector_hash` and `# entries` header lines
    /// followed by one `row col re im` line per stored upper-triangle entry.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# dimension {}", self.dimension)?;
        writeln!(w, "# sector_hash {:016x}", self.metadata.hash)?;
        writeln!(w, "# entries {}", self.entries.len())?;
        for &(r, c, v) in &self.entries {
            writeln!(w, "{} {} {:.16e} {:.16e}", r, c, v.re, v.im)?;
        }
        Ok(())
    }
}

/// Diagonal Σ ħc|q|n over photon slots.
pub fn build_photon_energy(sector: &FockSector, modes: &ModeSet, k: &Constants) -> Result<SparseHamiltonian> {
    check_lattice(sector, modes)?;
    let omega: Vec<f64> = modes.modes().iter().map(|m| k.hbar * m.omega(k.c)).collect();
    Ok(assemble(sector, metadata(sector, modes, k), |j, out| {
        let e: f64 = sector.photons(j).iter().enumerate().map(|(s, &n)| omega[s / 2] * n as f64).sum();
        out.push((j, C64::new(e, 0.0)));
    }))
}

/// Diagonal Σ ħ²k²/2m over occupied orbitals.
pub fn build_electron_kinetic(sector: &FockSector, modes: &ModeSet, k: &Constants) -> Result<SparseHamiltonian> {
    check_lattice(sector, modes)?;
    let kin = k.hbar * k.hbar / (2.0 * k.mass);
    Ok(assemble(sector, metadata(sector, modes, k), |j, out| {
        let e: f64 = sector
            .electrons(j)
            .iter()
            .map(|&o| {
                let q = sector.orbital_wavevector(o);
                kin * (q[0] * q[0] + q[1] * q[1] + q[2] * q[2])
            })
            .sum();
        out.push((j, C64::new(e, 0.0)));
    }))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Photon operators applied right to left; `true` is b†. Returns the
/// amplitude and resulting occupations, or `None` when the result vanishes
/// or leaves the truncated space.
fn apply_photons(sector: &FockSector, photons: &[u8], ops: &[(usize, bool)]) -> Option<(f64, Vec<u8>)> {
    let mut ph = photons.to_vec();
    let mut amp = 1.0;
    for &(s, dagger) in ops.iter().rev() {
        let n = ph[s];
        if dagger {
            ph[s] = n.checked_add(1)?;
            amp *= (n as f64 + 1.0).sqrt();
        } else {
            if n == 0 {
                return None;
            }
            ph[s] = n - 1;
            amp *= (n as f64).sqrt();
        }
    }
    sector.photons_allowed(&ph).then_some((amp, ph))
}

/// a†_{to} a_{from} on a sorted configuration.
fn hop(config: &[u32], from: u32, to: u32) -> Option<(f64, Vec<u32>)> {
    let (s1, c1) = annihilate_electron(config, from)?;
    let (s2, c2) = create_electron(&c1, to)?;
    Some((s1 * s2, c2))
}

struct Coupling {
    /// √(ħc/(Ω|q|)) per mode.
    g: Vec<f64>,
    /// polarization vector per slot.
    pol: Vec<[f64; 3]>,
    lattice: Vec<[i32; 3]>,
}

impl Coupling {
    fn new(modes: &ModeSet, k: &Constants) -> Self {
        let omega_vol = modes.box_length().powi(3);
        let g = modes.modes().iter().map(|m| (k.hbar * k.c / (omega_vol * m.magnitude())).sqrt()).collect();
        let pol = modes.modes().iter().flat_map(|m| m.polarizations).collect();
        let lattice = modes.modes().iter().map(|m| m.lattice).collect();
        Self { g, pol, lattice }
    }
}

fn shift(sector: &FockSector, orb: u32, p: [i32; 3]) -> Option<u32> {
    let m = sector.orbitals()[orb as usize];
    sector.orbital_index([m[0] + p[0], m[1] + p[1], m[2] + p[2]])
}

/// Normal-ordered -(e/2mc)(A·p + p·A) + (e²/2mc²)A² with A expanded in the
/// photon modes.
pub fn build_minimal_coupling(sector: &FockSector, modes: &ModeSet, k: &Constants) -> Result<SparseHamiltonian> {
    check_lattice(sector, modes)?;
    let cp = Coupling::new(modes, k);
    let q = k.coupling();
    let linear = -q / k.mass;
    let quad = q * q / (2.0 * k.mass);
    let slots = sector.slots();
    Ok(assemble(sector, metadata(sector, modes, k), |j, out| {
        let config = sector.electrons(j);
        let photons = sector.photons(j);
        let mut emit = |cfg: &[u32], ph: &[u8], v: f64| {
            if let Some(i) = sector.index_of(cfg, ph) {
                out.push((i, C64::new(v, 0.0)));
            }
        };
        for &o in config {
            let kv = sector.orbital_wavevector(o);
            // A·p: a†_{k+Q} a_k b_s and a†_{k-Q} a_k b†_s
            for s in 0..slots {
                let qm = cp.lattice[s / 2];
                let c = linear * cp.g[s / 2] * k.hbar * dot(cp.pol[s], kv);
                if c == 0.0 {
                    continue;
                }
                for (dagger, p) in [(false, qm), (true, qm.map(|x| -x))] {
                    let Some(to) = shift(sector, o, p) else { continue };
                    let Some((fs, cfg)) = hop(config, o, to) else { continue };
                    let Some((amp, ph)) = apply_photons(sector, photons, &[(s, dagger)]) else { continue };
                    emit(&cfg, &ph, c * fs * amp);
                }
            }
            // A²: b_s b_s', b†_s b†_s', b†_s' b_s, b†_s b_s'
            for s in 0..slots {
                for t in 0..slots {
                    let c = quad * cp.g[s / 2] * cp.g[t / 2] * dot(cp.pol[s], cp.pol[t]);
                    if c == 0.0 {
                        continue;
                    }
                    let (qs, qt) = (cp.lattice[s / 2], cp.lattice[t / 2]);
                    let terms: [([i32; 3], [(usize, bool); 2]); 4] = [
                        ([0, 1, 2].map(|a| qs[a] + qt[a]), [(s, false), (t, false)]),
                        ([0, 1, 2].map(|a| -qs[a] - qt[a]), [(s, true), (t, true)]),
                        ([0, 1, 2].map(|a| qs[a] - qt[a]), [(t, true), (s, false)]),
                        ([0, 1, 2].map(|a| qt[a] - qs[a]), [(s, true), (t, false)]),
                    ];
                    for (p, ops) in terms {
                        let Some(to) = shift(sector, o, p) else { continue };
                        let Some((fs, cfg)) = hop(config, o, to) else { continue };
                        let Some((amp, ph)) = apply_photons(sector, photons, &ops) else { continue };
                        emit(&cfg, &ph, c * fs * amp);
                    }
                }
            }
        }
    }))
}

/// (1/2) Σ V(κ) a†_{k+κ} a†_{k'-κ} a_{k'} a_k with V(κ) = 4πe²/(Ωκ²) and
/// the κ = 0 term omitted. Identically zero for one electron.
pub fn build_coulomb(sector: &FockSector, modes: &ModeSet, k: &Constants) -> Result<SparseHamiltonian> {
    check_lattice(sector, modes)?;
    let n_e = sector.params().n_electrons;
    if n_e > 2 {
        return Err(Error::UnsupportedElectronCount(n_e));
    }
    let l = sector.box_length();
    let unit = 2.0 * PI / l;
    let pref = 4.0 * PI * k.charge * k.charge / l.powi(3);
    let n_orb = sector.orbitals().len() as u32;
    Ok(assemble(sector, metadata(sector, modes, k), |j, out| {
        if n_e < 2 {
            return;
        }
        let config = sector.electrons(j);
        let photons = sector.photons(j);
        for (ka, kb) in [(config[0], config[1]), (config[1], config[0])] {
            let Some((s1, c1)) = annihilate_electron(config, ka) else { continue };
            let Some((s2, c2)) = annihilate_electron(&c1, kb) else { continue };
            let (ma, mb) = (sector.orbitals()[ka as usize], sector.orbitals()[kb as usize]);
            for t1 in 0..n_orb {
                let m1 = sector.orbitals()[t1 as usize];
                let kappa = [m1[0] - ma[0], m1[1] - ma[1], m1[2] - ma[2]];
                if kappa == [0, 0, 0] {
                    continue;
                }
                let Some(t2) = sector.orbital_index([mb[0] - kappa[0], mb[1] - kappa[1], mb[2] - kappa[2]]) else {
                    continue;
                };
                let Some((s3, c3)) = create_electron(&c2, t2) else { continue };
                let Some((s4, c4)) = create_electron(&c3, t1) else { continue };
                let k2 = unit * unit * (kappa.iter().map(|&x| (x * x) as f64).sum::<f64>());
                if let Some(i) = sector.index_of(&c4, photons) {
                    out.push((i, C64::new(0.5 * pref / k2 * s1 * s2 * s3 * s4, 0.0)));
                }
            }
        }
    }))
}

/// Photon energy + electron kinetic + minimal coupling + Coulomb.
pub fn assemble_h_qed(sector: &FockSector, modes: &ModeSet, k: &Constants) -> Result<SparseHamiltonian> {
    let h = build_photon_energy(sector, modes, k)?;
    let h = h.add(&build_electron_kinetic(sector, modes, k)?)?;
    let h = h.add(&build_minimal_coupling(sector, modes, k)?)?;
    h.add(&build_coulomb(sector, modes, k)?)
}
