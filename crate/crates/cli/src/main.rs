//! `qalg`: command-line demonstrations and checks for the qalgebra toolkit.

mod cmd;
mod config;
mod error;
mod output;
mod seeds;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use error::{CliError, CliResult};
use output::{Checks, Outputs, Stamp};

#[derive(Parser, Debug)]
#[command(name = "qalg", version, about = "Matrix C*-algebra, GNS, Weyl and dynamics checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random (state, observable pair) draws against the uncertainty inequality
    Uncertainty(RunArgs),
    /// GNS construction for a generated algebra and a density-matrix state
    Gns(RunArgs),
    /// Clock/shift relations, grid Weyl operators and the Heisenberg obstruction
    Weyl(RunArgs),
    /// Schrödinger evolution on a periodic grid
    Evolve(RunArgs),
    /// Lowest eigenvalues of a grid or radial Hamiltonian
    Spectrum(RunArgs),
    /// Poisson bracket table and a leapfrog trajectory
    Classical(RunArgs),
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunArgs {
    /// JSON config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run seed for randomized commands
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent samples (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

/// What a command hands back: files to write, checks, and the config hash.
pub struct Report {
    pub outputs: Outputs,
    pub checks: Checks,
    pub config_hash: String,
}

/// Run-wide settings passed to every command.
pub struct Ctx {
    pub seed: u64,
    pub pool: rayon::ThreadPool,
}

fn dispatch(name: &str, args: &RunArgs, ctx: &Ctx) -> CliResult<Report> {
    let path = &args.config;
    match name {
        "uncertainty" => cmd::uncertainty::run(path, ctx),
        "gns" => cmd::gns::run(path, ctx),
        "weyl" => cmd::weyl::run(path, ctx),
        "evolve" => cmd::evolve::run(path, ctx),
        "spectrum" => cmd::spectrum::run(path, ctx),
        "classical" => cmd::classical::run(path, ctx),
        _ => unreachable!("clap restricts subcommands"),
    }
}

fn execute(name: &str, args: &RunArgs) -> CliResult<()> {
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let ctx = Ctx { seed: args.seed, pool };

    let Report {
        mut outputs,
        checks,
        config_hash,
    } = dispatch(name, args, &ctx)?;
    outputs.json("checks.json", checks.to_value());
    let stamp = Stamp {
        command: name,
        config_hash: &config_hash,
        seed: args.seed,
    };
    outputs.write(&args.out, &stamp)?;

    let manifest = json!({
        "command": name,
        "config": args.config.display().to_string(),
        "config_hash": config_hash,
        "seed": args.seed,
        "out": args.out.display().to_string(),
        "version": env!("CARGO_PKG_VERSION"),
        "duration_seconds": start.elapsed().as_secs_f64(),
    });
    output::write_json(&args.out.join("run_manifest.json"), &manifest)?;

    if let Some(c) = checks.first_failure() {
        return Err(CliError::Check(format!(
            "{} (value {:e}, tolerance {:e})",
            c.name, c.value, c.tolerance
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Uncertainty(a) => ("uncertainty", a),
        Command::Gns(a) => ("gns", a),
        Command::Weyl(a) => ("weyl", a),
        Command::Evolve(a) => ("evolve", a),
        Command::Spectrum(a) => ("spectrum", a),
        Command::Classical(a) => ("classical", a),
    };
    match execute(name, args) {
        Ok(()) => {
            eprintln!("{name}: all checks passed; outputs in {}", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
