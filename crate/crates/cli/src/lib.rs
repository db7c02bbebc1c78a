//! Sweeps and reports over the `spindetect` models, written as CSV with a
//! `#` provenance header.

mod commands;
pub mod config;

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::Config;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("regime violation: {0}")]
    Regime(String),
    #[error(transparent)]
    Core(#[from] spindetect::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("refusing to overwrite {0}")]
    Exists(PathBuf),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use spindetect::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Capacity { .. } | E::Domain(_) | E::InvalidGeometry(_) | E::OddQubitCount(_)) => 2,
            CliError::Regime(_) | CliError::Core(E::Regime(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FieldMap,
    Optimize,
    TsMap,
    OracleCompare,
    PulseSim,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::FieldMap => "field-map",
            Command::Optimize => "optimize",
            Command::TsMap => "ts-map",
            Command::OracleCompare => "oracle-compare",
            Command::PulseSim => "pulse-sim",
            Command::Verify => "verify",
        }
    }

    /// Accepted keys with their default values.
    pub fn defaults(self) -> &'static [(&'static str, &'static str)] {
        commands::defaults(self)
    }
}

/// One fully specified run.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    /// Settings from the config file.
    pub file: Config,
    /// Settings from command-line flags, applied over `file`.
    pub overrides: Config,
    pub seed: Option<u64>,
    pub strict: bool,
    pub out_dir: PathBuf,
}

/// A rendered output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub config: Config,
}

/// Effective settings: defaults < file < flags, with `--seed` last.
pub fn effective_config(inv: &Invocation) -> Result<Config, CliError> {
    let mut user = inv.file.merged(&inv.overrides);
    if let Some(seed) = inv.seed {
        user.set("seed", seed.to_string());
    }
    user.resolve(inv.command.defaults())
}

/// Lines prepended to every CSV of a run.
pub fn provenance(command: Command, config: &Config) -> Vec<String> {
    let mut lines = vec![
        format!("# tool = spindetect {}", env!("CARGO_PKG_VERSION")),
        format!("# command = {}", command.name()),
        format!("# seed = {}", config.raw("seed").unwrap_or("none")),
    ];
    lines.extend(config.echo_lines());
    lines
}

/// Artifacts of a run, computed without touching the filesystem.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub config: Config,
    pub artifacts: Vec<Artifact>,
    /// Set when a verification check failed; the artifacts are still written.
    pub failure: Option<String>,
}

pub fn render(inv: &Invocation) -> Result<Rendered, CliError> {
    let config = effective_config(inv)?;
    let header = provenance(inv.command, &config).join("\n");
    let out = commands::run(inv.command, &config, inv.strict)?;
    let artifacts = out
        .files
        .into_iter()
        .map(|(name, body)| Artifact {
            name,
            contents: format!("{header}\n{body}"),
        })
        .collect();
    Ok(Rendered {
        config,
        artifacts,
        failure: out.failure,
    })
}

/// Writes each artifact to a new file in `dir`; nothing is written if any
/// target already exists.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let paths: Vec<PathBuf> = artifacts.iter().map(|a| dir.join(&a.name)).collect();
    if let Some(p) = paths.iter().find(|p| p.exists()) {
        return Err(CliError::Exists(p.clone()));
    }
    for (a, p) in artifacts.iter().zip(&paths) {
        let mut f = OpenOptions::new().write(true).create_new(true).open(p)?;
        f.write_all(a.contents.as_bytes())?;
    }
    Ok(paths)
}

pub fn run(inv: &Invocation) -> Result<RunSummary, CliError> {
    let r = render(inv)?;
    let written = write_all(&inv.out_dir, &r.artifacts)?;
    for p in &written {
        log::info!("wrote {}", p.display());
    }
    match r.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(RunSummary {
            written,
            config: r.config,
        }),
    }
}
