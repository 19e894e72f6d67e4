use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::{CliError, Common};

/// Squeezed-state quantisation toolkit: portraits, PDM dynamics, oracle reports.
#[derive(Parser)]
#[command(name = "sqzq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid CSV (q1, q2, value) of chi, mass1/2, q2chi1/2, veff, sep_hq or nonsep_hq.
    Portrait(Flags),
    /// Trajectory CSV `t,q1,q2,p1,p2,E` plus summary.json.
    Simulate(Flags),
    /// JSON report of oracle-versus-closed-form deviations and errata.
    Verify(Flags),
    /// Fock-basis matrix of a quantised classical function.
    Quantise(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled setup: fig3a..c, fig4a..c, fig6a..c (portrait also accepts fig5).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator relative tolerance, or verify quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Fock truncation: levels per mode for quantise, N for verify.
    #[arg(long)]
    fock_dim: Option<usize>,
    /// Add wall-clock runtime to the summary (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

impl From<Flags> for Common {
    fn from(f: Flags) -> Self {
        Common { config: f.config, preset: f.preset, out: f.out, tol: f.tol, fock_dim: f.fock_dim, timing: f.timing }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SQZQ_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("SQZQ_THREADS={v}: not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("SQZQ_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| match cli.command {
        Command::Portrait(f) => commands::portrait(&f.into()),
        Command::Simulate(f) => commands::simulate(&f.into()),
        Command::Verify(f) => commands::verify(&f.into()),
        Command::Quantise(f) => commands::quantise(&f.into()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sqzq: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
