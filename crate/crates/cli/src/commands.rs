//! `evolve`, `spectrum`, `modes` and `export-h`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nrqed_core::dynamics::{total_energy, SemiclassicalState, StrangIntegrator};
use nrqed_core::eigen::{lanczos, LanczosOptions};
use nrqed_core::hamiltonian::assemble_h_qed;
use nrqed_core::sources::{charge_density, continuity_residual};
use nrqed_core::spectral::Spectral;

use crate::config::Config;
use crate::setup;
use crate::snapshot::Snapshot;
use crate::CliError;

fn observable_line(sp: &Spectral, s: &SemiclassicalState, cfg: &Config) -> Result<String, CliError> {
    let k = cfg.constants()?;
    let e = total_energy(sp, s, &k)?;
    let v = sp.solve_coulomb(&charge_density(sp, &s.psi, &k)?)?;
    let cont = continuity_residual(sp, &s.psi, &s.a_perp, &v, &k)?.relative;
    Ok(format!(
        "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
        s.t,
        e.total,
        e.field(),
        e.kinetic,
        e.coulomb,
        s.psi.norm_sqr(),
        cont
    ))
}

fn write_snapshots(dir: &Path, step: usize, s: &SemiclassicalState) -> Result<(), CliError> {
    let parts = [
        ("psi", Snapshot::complex(&s.psi, s.t)),
        ("a", Snapshot::vector(&s.a_perp, s.t)),
        ("pi", Snapshot::vector(&s.pi_perp, s.t)),
    ];
    for (name, snap) in parts {
        let mut w = BufWriter::new(File::create(dir.join(format!("{name}_{step:06}.bin")))?);
        snap.write(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn evolve(cfg: &Config, snapshots: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let sp = setup::spectral(cfg)?;
    let state = setup::initial_state(cfg, &sp)?;
    let integ = StrangIntegrator::new(sp.clone(), cfg.constants()?);
    if let Some(dir) = snapshots {
        std::fs::create_dir_all(dir)?;
    }
    writeln!(out, "# t total_energy field_energy kinetic coulomb norm continuity_residual")?;
    let every = cfg.dynamics.output_every;
    let steps = cfg.dynamics.steps;
    let mut failure = None;
    integ.evolve(&state, cfg.dynamics.dt, steps, |n, s| {
        if n % every == 0 || n == steps {
            let line = observable_line(&sp, s, cfg).and_then(|l| Ok(writeln!(out, "{l}")?));
            let snap = snapshots.map_or(Ok(()), |d| write_snapshots(d, n, s));
            if let Err(e) = line.and(snap) {
                failure = Some(e);
                return Err(nrqed_core::Error::NonFinite { what: "output", t: s.t });
            }
        }
        Ok(())
    })
    .map_err(|e| failure.take().unwrap_or(e.into()))?;
    Ok(())
}

pub fn spectrum(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let modes = setup::mode_set(cfg)?;
    let sector = setup::sector(cfg, &modes)?;
    let h = assemble_h_qed(&sector, &modes, &cfg.constants()?)?;
    let s = &cfg.spectrum;
    let opts = LanczosOptions {
        n_eigs: s.n_eigs.min(h.dimension()),
        tol: s.tol,
        max_iter: s.max_iter,
        seed: s.seed,
        want_vectors: false,
    };
    let r = lanczos(&h, &opts)?;
    writeln!(out, "# dimension {}", h.dimension())?;
    for e in r.eigenvalues {
        writeln!(out, "{e:.16e}")?;
    }
    Ok(())
}

pub fn modes(cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let modes = setup::mode_set(cfg)?;
    let c = cfg.constants()?.c;
    writeln!(out, "# qx qy qz |q| omega e1x e1y e1z e2x e2y e2z")?;
    for m in modes.modes() {
        let [e1, e2] = m.polarizations;
        writeln!(
            out,
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            m.q[0],
            m.q[1],
            m.q[2],
            m.magnitude(),
            m.omega(c),
            e1[0],
            e1[1],
            e1[2],
            e2[0],
            e2[1],
            e2[2]
        )?;
    }
    Ok(())
}

pub fn export_h(cfg: &Config, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let modes = setup::mode_set(cfg)?;
    let sector = setup::sector(cfg, &modes)?;
    let h = assemble_h_qed(&sector, &modes, &cfg.constants()?)?;
    match output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            h.write_text(&mut w)?;
            w.flush()?;
        }
        None => h.write_text(&mut *out)?,
    }
    Ok(())
}
