use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bogs_cli::{execute, Command};

#[derive(Parser)]
#[command(name = "bogs", version, about = "Benjamin-Ono type equations: simulation and verification")]
struct Cli {
    /// simulate | gauge-verify | conserve | norms | probe | lp-check | prop14 | scale
    command: String,
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving the run directory
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Seed for random initial data and ensembles
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .command
        .parse::<Command>()
        .and_then(|cmd| execute(cmd, &cli.config, &cli.out, cli.seed));
    match result {
        Ok((dir, outcome)) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for line in &outcome.summary {
                println!("{line}");
            }
            println!("outputs in {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
