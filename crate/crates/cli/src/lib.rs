//! Command-line runner: configuration files, snapshot persistence and CSV
//! reports over the `bogs` numerical core.
//!
//! `bogs <command> --config <path> [--out <dir>] [--seed <u64>]` writes its
//! outputs to `<out>/run-<unix seconds>-seed<seed>/`.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod snapshot;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub use commands::{dispatch, Command, Outcome};
pub use config::{load_config, parse_config, RunConfig};
pub use error::{CliError, ConfigError};

/// A fresh run directory `<out>/run-<secs>-seed<seed>`, suffixed with a
/// counter if that name is already taken.
pub fn create_run_dir(out: &Path, secs: u64, seed: u64) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.to_path_buf(), source })?;
    let base = format!("run-{secs}-seed{seed}");
    for k in 0u32.. {
        let name = if k == 0 { base.clone() } else { format!("{base}-{k}") };
        let dir = out.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(source) => return Err(CliError::Io { path: dir, source }),
        }
    }
    unreachable!("run directory counter exhausted")
}

/// Loads the configuration, runs the command and writes its outputs plus a
/// copy of the configuration into a new run directory.
pub fn execute(cmd: Command, config: &Path, out: &Path, seed: u64) -> Result<(PathBuf, Outcome), CliError> {
    let (cfg, text) = load_config(config)?;
    let outcome = dispatch(cmd, &cfg, seed)?;
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let dir = create_run_dir(out, secs, seed)?;
    let copy = dir.join("config.toml");
    fs::write(&copy, text).map_err(|source| CliError::Io { path: copy, source })?;
    report::write_artifacts(&dir, &outcome.artifacts)?;
    Ok((dir, outcome))
}
