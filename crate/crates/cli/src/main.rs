use std::path::PathBuf;
use std::process::ExitCode;

use aniso_stefan::commands;
use aniso_stefan::{CliResult, ExperimentConfig, Overrides, SweepParam};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "aniso-stefan",
    version,
    about = "Anisotropic Stefan-type problems: solves, sweeps and certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML)
    config: PathBuf,
    /// Output directory, overrides `[output] dir`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled checks and random starts
    #[arg(long)]
    seed: Option<u64>,
    /// Certificate tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Eps,
    Mn,
    Grid,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and certify
    Solve(Common),
    /// Parameter sweep, one CSV row per point
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "eps")]
        param: Param,
    },
    /// Flux assumptions and graph invariants, no solve
    Check(Common),
    /// Poincaré and Sobolev ratios on seeded test fields
    Embeddings(Common),
}

fn load(c: &Common) -> CliResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    Overrides {
        out: c.out.clone(),
        seed: c.seed,
        tol: c.tol,
    }
    .apply(&mut cfg);
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Solve(c) => commands::solve(&load(&c)?),
        Command::Sweep { common, param } => {
            let p = match param {
                Param::Eps => SweepParam::Eps,
                Param::Mn => SweepParam::Mn,
                Param::Grid => SweepParam::Grid,
            };
            commands::sweep(&load(&common)?, p)
        }
        Command::Check(c) => commands::check(&load(&c)?),
        Command::Embeddings(c) => commands::embeddings(&load(&c)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
