//! Configuration, dispatch and CSV output for the `steklov` binary.

pub mod config;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Kind, RunConfig};
use run::RunError;

#[derive(Debug, Parser)]
#[command(name = "steklov", version, about = "Steklov eigenvalue laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a base mesh and report its topology.
    Mesh(Common),
    /// Steklov spectrum of a base surface.
    Spectrum(Common),
    /// Attach a cuspidal strip and solve the glued surface.
    Glue(Common),
    /// Reduced thin-part model, coupled solve and combined test function.
    Reduce(Common),
    /// Compare FEM eigenvalues with the asymptotic bounds and expansion.
    VerifyAsymptotics(Common),
    /// Maximize the normalized first eigenvalue over boundary densities.
    Optimize(Common),
    /// Parameter grid of one experiment, one CSV row per point.
    Sweep(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// INI run configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Overrides `run.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    pub fn kind(&self) -> Kind {
        match self {
            Command::Mesh(_) => Kind::Mesh,
            Command::Spectrum(_) => Kind::Spectrum,
            Command::Glue(_) => Kind::Glue,
            Command::Reduce(_) => Kind::Reduce,
            Command::VerifyAsymptotics(_) => Kind::VerifyAsymptotics,
            Command::Optimize(_) => Kind::Optimize,
            Command::Sweep(_) => Kind::Sweep,
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Mesh(c)
            | Command::Spectrum(c)
            | Command::Glue(c)
            | Command::Reduce(c)
            | Command::VerifyAsymptotics(c)
            | Command::Optimize(c)
            | Command::Sweep(c) => c,
        }
    }
}

/// Loads the configuration for `cmd`; a `run.kind` in the file must agree with the subcommand.
pub fn load(cmd: &Command) -> Result<RunConfig, RunError> {
    let c = cmd.common();
    let mut cfg = match &c.config {
        Some(path) => {
            let cfg = RunConfig::from_file(path)?;
            if cfg.kind != cmd.kind() {
                return Err(config::ConfigError::new(
                    "run.kind",
                    format!("config is for `{}`, not `{}`", cfg.kind.word(), cmd.kind().word()),
                )
                .into());
            }
            cfg
        }
        None => RunConfig::with_kind(cmd.kind()),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

pub fn execute(cmd: &Command) -> Result<Vec<PathBuf>, RunError> {
    let cfg = load(cmd)?;
    let c = cmd.common();
    run::run(&cfg, &c.out, c.threads)
}
