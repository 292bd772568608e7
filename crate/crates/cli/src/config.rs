//! TOML run configuration.
//!
//! Every section is optional and falls back to [`Config::default`]; unknown
//! keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use nrqed_core::fock::SectorParams;
use nrqed_core::grid::Grid3;
use nrqed_core::sources::Constants;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub grid: GridConfig,
    pub constants: ConstantsConfig,
    pub modes: ModesConfig,
    pub dynamics: DynamicsConfig,
    pub spectrum: SpectrumConfig,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Points per axis.
    pub n: usize,
    pub box_length: f64,
    /// 2/3-rule filtering of quadratic products.
    pub dealias: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 32, box_length: 10.0, dealias: false }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub hbar: f64,
    pub m: f64,
    pub e: f64,
    pub c: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let k = Constants::default();
        Self { hbar: k.hbar, m: k.mass, e: k.charge, c: k.c }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModesConfig {
    pub q_cutoff: f64,
    pub n_max: u8,
    pub n_ph_max: u32,
    pub k_cutoff: f64,
    pub n_electrons: usize,
    pub dimension_cap: usize,
}

impl Default for ModesConfig {
    fn default() -> Self {
        Self { q_cutoff: 0.65, n_max: 2, n_ph_max: 2, k_cutoff: 0.9, n_electrons: 1, dimension_cap: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub dt: f64,
    pub steps: usize,
    pub output_every: usize,
    /// Gaussian width of the initial wave packet.
    pub packet_width: f64,
    /// Mean wavevector of the initial wave packet.
    pub packet_momentum: [f64; 3],
    /// Amplitude of each initial A_⊥ mode (all modes of the photon mode set,
    /// both polarizations).
    pub field_amplitude: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            dt: 0.003,
            steps: 1000,
            output_every: 100,
            packet_width: 1.5,
            packet_momentum: [1.0, -0.5, 0.0],
            field_amplitude: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub n_eigs: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Total lattice momentum of the block to diagonalize; whole sector when absent.
    pub momentum_block: Option<[i32; 3]>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { n_eigs: 4, tol: 1e-12, max_iter: 500, seed: 1, momentum_block: None }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn grid(&self) -> Result<Grid3, CliError> {
        Grid3::cubic(self.grid.n, self.grid.box_length).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn constants(&self) -> Result<Constants, CliError> {
        let c = &self.constants;
        Constants::new(c.hbar, c.m, c.e, c.c).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn sector_params(&self) -> SectorParams {
        let m = &self.modes;
        SectorParams {
            n_max: m.n_max,
            n_ph_max: m.n_ph_max,
            k_cutoff: m.k_cutoff,
            n_electrons: m.n_electrons,
            total_momentum: self.spectrum.momentum_block,
            dimension_cap: m.dimension_cap,
        }
    }

    /// Checks ranges and that the photon modes and electron orbitals are
    /// representable on the grid.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let grid = self.grid()?;
        self.constants()?;
        let unit = 2.0 * PI / grid.box_length();
        let kmax = grid.max_resolved_wavenumber();
        let m = &self.modes;
        if !(m.q_cutoff >= unit * (1.0 - 1e-12)) {
            return bad(format!("modes.q_cutoff = {} is below the smallest lattice wavevector {unit}", m.q_cutoff));
        }
        if m.q_cutoff > kmax || m.k_cutoff > kmax {
            return bad(format!(
                "inconsistent lattice: q_cutoff = {} and k_cutoff = {} must not exceed the grid's largest resolved wavenumber {kmax}",
                m.q_cutoff, m.k_cutoff
            ));
        }
        if !(m.k_cutoff >= 0.0) {
            return bad(format!("modes.k_cutoff must be non-negative, got {}", m.k_cutoff));
        }
        if !(1..=2).contains(&m.n_electrons) {
            return bad(format!("modes.n_electrons must be 1 or 2, got {}", m.n_electrons));
        }
        let d = &self.dynamics;
        if !(d.dt > 0.0 && d.dt.is_finite()) {
            return bad(format!("dynamics.dt must be positive, got {}", d.dt));
        }
        if d.output_every == 0 {
            return bad("dynamics.output_every must be at least 1".into());
        }
        if !(d.packet_width > 0.0) {
            return bad(format!("dynamics.packet_width must be positive, got {}", d.packet_width));
        }
        if !d.field_amplitude.is_finite() || !d.packet_momentum.iter().all(|x| x.is_finite()) {
            return bad("dynamics.field_amplitude and packet_momentum must be finite".into());
        }
        let s = &self.spectrum;
        if s.n_eigs == 0 {
            return bad("spectrum.n_eigs must be at least 1".into());
        }
        if !(s.tol > 0.0) || s.max_iter == 0 {
            return bad(format!("spectrum.tol = {} and max_iter = {} must be positive", s.tol, s.max_iter));
        }
        Ok(())
    }
}
