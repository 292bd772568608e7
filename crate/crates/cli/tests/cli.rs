use std::fs;
use std::path::Path;

use nrqed::config::Config;
use nrqed::snapshot::{Kind, Snapshot};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["nrqed"];
    full.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = nrqed::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "[grid]\nn = 16\n[dynamics]\nsteps = 12\noutput_every = 4\n";

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["verify"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "[grid]\nn = 16\nbogus = 1\n");
    let (code, _, err) = run(&["spectrum", &p]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"), "{err}");
    assert_eq!(run(&["modes", "/nonexistent/run.toml"]).0, 2);
    let p = write_config(dir.path(), SMALL);
    assert_eq!(run(&["--workers", "0", "modes", &p]).0, 2);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("export-h"));
}

#[test]
fn verify_passes_on_shipped_config() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml");
    assert_eq!(Config::load(Path::new(path)).unwrap(), Config::default());
    let (code, out, err) = run(&["verify", path]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.lines().skip(1).all(|l| l.ends_with("PASS")));
    assert!(out.lines().count() >= 15);
}

#[test]
fn verify_failure_exits_1() {
    // a charge this large makes the gauge phase exp(ieχ/ħc) unresolved on 16³
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "[grid]\nn = 16\n[constants]\ne = -300.0\n");
    let (code, out, err) = run(&["verify", &p]);
    assert_eq!(code, 1);
    assert!(err.is_empty());
    let failed: Vec<&str> = out.lines().filter(|l| l.ends_with("FAIL")).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0].starts_with("gauge_invariance"));
}

#[test]
fn decoupled_spectrum_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "[constants]\ne = 0.0\n[spectrum]\nn_eigs = 5\nmomentum_block = [0, 0, 0]\n");
    let (code, out, _) = run(&["spectrum", &p]);
    assert_eq!(code, 0);
    let vals: Vec<f64> = out.lines().filter(|l| !l.starts_with('#')).map(|l| l.parse().unwrap()).collect();
    // K = 0: electron at rest with no photons, then one electron at -q with
    // one photon at +q (|q| = 2π/10), which costs ħc|q| + ħ²q²/2m.
    let q = 2.0 * std::f64::consts::PI / 10.0;
    let one = 137.036 * q + 0.5 * q * q;
    assert_eq!(vals.len(), 5);
    assert!(vals[0].abs() < 1e-12);
    for v in &vals[1..] {
        assert!((v - one).abs() < 1e-10, "{v} vs {one}");
    }
}

#[test]
fn modes_lists_six_lowest() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), SMALL);
    let (code, out, _) = run(&["modes", &p]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<f64>> =
        out.lines().skip(1).map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert_eq!(r.len(), 11);
        assert!((r[4] - 137.036 * r[3]).abs() < 1e-12);
    }
}

#[test]
fn export_h_to_file_and_stdout_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "[spectrum]\nmomentum_block = [0, 0, 0]\n");
    let file = dir.path().join("h.txt");
    assert_eq!(run(&["export-h", &p, "--output", file.to_str().unwrap()]).0, 0);
    let (code, out, _) = run(&["export-h", &p]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&file).unwrap(), out);
    assert!(out.starts_with("# dimension "));
    let entries: usize = out.lines().nth(2).unwrap().trim_start_matches("# entries ").parse().unwrap();
    assert_eq!(out.lines().count(), 3 + entries);
}

#[test]
fn evolve_is_reproducible_and_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), SMALL);
    let snaps = dir.path().join("snaps");
    let (code, first, _) = run(&["evolve", &p, "--snapshots", snaps.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, second, _) = run(&["evolve", &p]);
    assert_eq!(first, second);
    let rows: Vec<Vec<f64>> =
        first.lines().skip(1).map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.len(), 7);
        assert!((r[5] - 1.0).abs() < 1e-10, "norm {}", r[5]);
        assert!(((r[1] - rows[0][1]) / rows[0][1]).abs() < 1e-4);
    }
    let psi = Snapshot::read(fs::File::open(snaps.join("psi_000012.bin")).unwrap()).unwrap();
    assert_eq!(psi.kind, Kind::ComplexScalar);
    assert_eq!(psi.shape, [16; 3]);
    assert_eq!(psi.t, rows[3][0]);
    let a = Snapshot::read(fs::File::open(snaps.join("a_000004.bin")).unwrap()).unwrap();
    assert_eq!(a.data.len(), 3 * 16 * 16 * 16);
    assert_eq!(fs::read_dir(&snaps).unwrap().count(), 12);
}
