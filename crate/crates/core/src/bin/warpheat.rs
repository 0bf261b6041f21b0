use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use warpheat::config::ExperimentConfig;
use warpheat::experiments::{self, Command};

#[derive(Parser)]
#[command(name = "warpheat", version, about = "Semilinear heat equations on model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the curvature hypotheses and tabulate drift and curvatures.
    Geometry(Common),
    /// Dirichlet eigenvalues on an increasing family of balls.
    Eigen(Common),
    /// Build a barrier and verify it is a supersolution.
    Barrier(Common),
    /// Evolve one initial datum and compare it with the envelope.
    Simulate(Common),
    /// Phase diagram over p (and sigma for exponential forcing).
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Exit with status 1 when any verification fails.
    #[arg(long)]
    strict: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Geometry(a) => (Command::Geometry, a),
        Cmd::Eigen(a) => (Command::Eigen, a),
        Cmd::Barrier(a) => (Command::Barrier, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        (None, Some(name)) => experiments::preset(name)?,
        (None, None) => bail!(
            "pass --config <path> or --preset <name> (available: {})",
            experiments::preset_names().join(", ")
        ),
    };
    let report = experiments::run(command, &cfg, &args.out, args.threads)?;
    for v in &report.verifications {
        println!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(report.all_pass() || !args.strict)
}
