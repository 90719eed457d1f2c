//! `fockdyn`: classify and numerically verify weighted composition operators
//! on the Fock space.
//!
//! `FOCKDYN_THREADS` caps the worker threads; `0` runs sequentially.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fockdyn_core::report::{run, Command, RunConfig, EXIT_PARSE};

#[derive(Parser)]
#[command(name = "fockdyn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form verdicts as JSON
    Classify(Common),
    /// Run every experiment and check it against the verdicts
    Verify(Common),
    /// Truncated matrix as CSV
    Matrix(Common),
    /// Resolvent functional over the λ-grid as CSV
    Scan(Common),
    /// Supercyclicity probe as CSV
    Probe(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of the configured output or stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the truncation dimension
    #[arg(long)]
    n_dim: Option<usize>,
    /// Override the seed
    #[arg(long)]
    seed: Option<u64>,
}

fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var("FOCKDYN_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("FOCKDYN_THREADS must be a non-negative integer, got {v:?}")),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(cap: Option<usize>) {
    if let Some(n) = cap {
        // 0 means sequential: a single worker
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_cap: Option<usize>) {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Classify(c) => (Command::Classify, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Matrix(c) => (Command::Matrix, c),
        Cmd::Scan(c) => (Command::Scan, c),
        Cmd::Probe(c) => (Command::Probe, c),
    };
    match thread_cap() {
        Ok(cap) => configure_threads(cap),
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_PARSE as u8);
        }
    }
    let mut cfg = match RunConfig::from_file(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(fockdyn_core::report::exit_code(&e) as u8);
        }
    };
    if let Some(n) = common.n_dim {
        cfg.n_dim = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let out = run(command, &cfg);
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    if !out.body.is_empty() {
        match common.out.or(cfg.output.clone()) {
            Some(path) => {
                if let Err(e) = std::fs::write(&path, &out.body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_PARSE as u8);
                }
            }
            None => print!("{}", out.body),
        }
    }
    ExitCode::from(out.code as u8)
}
