//! Command-line front end for `nrqed-core`: TOML configs, verification
//! table, field snapshots and matrix export.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod checks;
pub mod commands;
pub mod config;
pub mod setup;
pub mod snapshot;
pub mod verify;

pub use config::Config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0} verification check(s) failed")]
    Verification(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<nrqed_core::Error> for CliError {
    fn from(e: nrqed_core::Error) -> Self {
        use nrqed_core::Error as E;
        match e {
            E::NonFinite { .. } | E::NoConvergence { .. } | E::Degenerate { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nrqed", version, about = "Non-relativistic QED on a periodic box")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the built-in consistency checks and print a pass/fail table.
    Verify { config: PathBuf },
    /// Integrate the semiclassical equations and stream observables.
    Evolve {
        config: PathBuf,
        /// Write psi, A and Pi snapshots here at every output step.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Lowest eigenvalues of the truncated QED Hamiltonian.
    Spectrum { config: PathBuf },
    /// List the photon modes.
    Modes { config: PathBuf },
    /// Write the sparse Hamiltonian as text.
    ExportH {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.workers {
        Some(0) => Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, out)),
            Err(e) => Err(CliError::Numerical(e.to_string())),
        },
        None => dispatch(&cli.command, out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::Verification(_)) {
                let _ = writeln!(err, "error: {e}");
            }
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match cmd {
        Command::Verify { config } => verify::run(&Config::load(config)?, out),
        Command::Evolve { config, snapshots } => commands::evolve(&Config::load(config)?, snapshots.as_deref(), out),
        Command::Spectrum { config } => commands::spectrum(&Config::load(config)?, out),
        Command::Modes { config } => commands::modes(&Config::load(config)?, out),
        Command::ExportH { config, output } => commands::export_h(&Config::load(config)?, output.as_deref(), out),
    }
}
