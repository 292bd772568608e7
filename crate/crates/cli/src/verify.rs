//! The `verify` command: every check on the configured system, one table row
//! each, `name value tolerance PASS|FAIL`.

use std::io::Write;

use nrqed_core::dynamics::StrangIntegrator;
use nrqed_core::eigen::{dense_eigenvalues, lanczos, LanczosOptions};
use nrqed_core::fock::{enumerate_sector, SectorParams};
use nrqed_core::hamiltonian::assemble_h_qed;

use crate::checks::{self, DENSE_LIMIT};
use crate::config::Config;
use crate::setup;
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Row {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// Runs all checks. Dense comparisons use the configured momentum block, or
/// the zero-momentum block when none is set.
pub fn rows(cfg: &Config) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    let mut push = |name, value, tolerance| rows.push(Row { name, value, tolerance });

    let sp = setup::spectral(cfg)?;
    let k = cfg.constants()?;
    let max_mode = (cfg.grid.n / 8).max(1);
    let seed = cfg.spectrum.seed;
    push("continuity", checks::continuity(&sp, &k, max_mode, seed)?, 1e-8);
    // the gauge factor exp(ieχ/ħc) is not band-limited; this keeps it resolved
    let gauge = checks::gauge(&sp, &k, (cfg.grid.n / 16).max(1), seed)?;
    push("gauge_invariance", gauge.observables, 1e-9);
    push("gauge_composition", gauge.composition, 1e-12);

    let modes = setup::mode_set(cfg)?;
    push("free_mode_period", checks::free_mode_period_error(&sp, &k, &modes, 16)?, 1e-8);
    let state = setup::initial_state(cfg, &sp)?;
    let integ = StrangIntegrator::new(sp.clone(), k);
    let short = checks::short_run(&integ, &state, cfg.dynamics.dt, 10)?;
    push("norm_change", short.norm_change, 1e-10);
    push("transversality", short.max_divergence, 1e-10);

    let base = cfg.sector_params();
    let full = enumerate_sector(&modes, SectorParams { total_momentum: None, ..base })?;
    let h_full = assemble_h_qed(&full, &modes, &k)?;
    push("hermiticity", h_full.hermiticity_defect(), 1e-14);
    push("momentum_violations", checks::momentum_violations(&h_full, &full) as f64, 0.0);

    let block = SectorParams { total_momentum: Some(base.total_momentum.unwrap_or([0; 3])), ..base };
    let sector = enumerate_sector(&modes, block)?;
    let n = cfg.spectrum.n_eigs.min(sector.dimension());
    let free = k.with_charge(0.0);
    let h0 = assemble_h_qed(&sector, &modes, &free)?;
    let closed = checks::decoupled_energies(&sector, &modes, &free);
    push("decoupled_spectrum", checks::max_abs_diff(&checks::lowest_eigenvalues(&h0, n, seed)?, &closed[..n]), 1e-12);

    let single = enumerate_sector(&modes, SectorParams { k_cutoff: 0.0, n_electrons: 1, total_momentum: None, ..base })?;
    let ladder = checks::ladder_algebra(&single)?;
    push("ladder_commutator", ladder.commutator, 1e-12);
    push("ladder_adjoint", ladder.adjoint, 1e-14);

    push("polarization_rotation", checks::rotation_invariance(&modes, block, &k, n)?, 1e-10);
    let (count, largest) = checks::single_electron_coulomb(&modes, block, &k)?;
    push("single_electron_coulomb", largest.max(count as f64), 0.0);

    if sector.dimension() <= DENSE_LIMIT {
        let h = assemble_h_qed(&sector, &modes, &k)?;
        let opts = LanczosOptions {
            n_eigs: n,
            tol: cfg.spectrum.tol,
            max_iter: cfg.spectrum.max_iter,
            seed,
            want_vectors: false,
        };
        let l = lanczos(&h, &opts)?.eigenvalues;
        push("lanczos_vs_dense", checks::max_abs_diff(&l, &dense_eigenvalues(&h)[..n]), 1e-10);
    }
    Ok(rows)
}

pub fn run(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = rows(cfg)?;
    writeln!(out, "# check value tolerance result")?;
    for r in &rows {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{:<24} {:.16e} {:.16e} {verdict}", r.name, r.value, r.tolerance)?;
    }
    match rows.iter().filter(|r| !r.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::Verification(n)),
    }
}
