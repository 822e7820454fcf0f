mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "treeloc", version, about = "Fractional-moment localization certificates on the binary tree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: `output_dir` of the config, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Contraction certificate for every configured (E0, kappa).
    Certify,
    /// Monte Carlo fractional moments over the configured n values.
    Simulate,
    /// Key-estimate point zeta for every configured energy.
    Keyest,
    /// Oracle battery.
    Crosscheck,
    /// Monte Carlo moments over the full (E, kappa, n) grid.
    Sweep,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.ok_or_else(|| CliError::Input("--config <path> is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = Some(out);
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let ctx = commands::Context::new(cfg)?;
    match cli.command {
        Command::Certify => commands::certify::run(&ctx),
        Command::Simulate => commands::simulate::run(&ctx),
        Command::Keyest => commands::keyest::run(&ctx),
        Command::Crosscheck => commands::crosscheck::run(&ctx),
        Command::Sweep => commands::sweep::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
