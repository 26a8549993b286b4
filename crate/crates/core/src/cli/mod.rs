//! Command-line surface: `dbsim <command> [flags]`.
//!
//! Commands: `rates`, `lambda`, `snr`, `bounds` (figure data), `sample`
//! (exact distribution plus shots), `montecarlo` (heralded-source simulation)
//! and `gauss` (submatrix entry statistics). Each run is determined by its
//! manifest; `--manifest file.json` supplies one, and its values take
//! precedence over flags.

pub mod commands;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{execute, workers_from_env, Artifact, WORKERS_ENV};
pub use manifest::{Command, ExperimentManifest, LambdaRule, LayerRule, ManifestFields, ModeRule, OutputFormat};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dbsim", version, about = "Driven boson sampling simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, clap::Args)]
pub struct Invocation {
    #[command(flatten)]
    pub fields: ManifestFields,
    /// JSON manifest; its values override flags.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output file (stdout if omitted; required by sample).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Success probability at optimal (and optionally fixed) squeezing.
    Rates(Invocation),
    /// Optimal squeezing per scheme.
    Lambda(Invocation),
    /// Heralding signal-to-noise ratio per scheme.
    Snr(Invocation),
    /// Exact output distribution and sampled shots.
    Sample(Invocation),
    /// Shot-level simulation of the heralded sources.
    Montecarlo(Invocation),
    /// Unit-SNR bounds and optimum asymptotes.
    Bounds(Invocation),
    /// Kolmogorov-Smirnov tests of submatrix entries.
    Gauss(Invocation),
}

impl Sub {
    fn split(self) -> (Command, Invocation) {
        match self {
            Sub::Rates(i) => (Command::Rates, i),
            Sub::Lambda(i) => (Command::Lambda, i),
            Sub::Snr(i) => (Command::Snr, i),
            Sub::Sample(i) => (Command::Sample, i),
            Sub::Montecarlo(i) => (Command::Montecarlo, i),
            Sub::Bounds(i) => (Command::Bounds, i),
            Sub::Gauss(i) => (Command::Gauss, i),
        }
    }
}

/// Parses arguments into a resolved manifest.
pub fn manifest_from_args<I, T>(args: I) -> Result<ExperimentManifest>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    let (command, inv) = cli.command.split();
    let file = inv
        .manifest
        .as_deref()
        .map(ExperimentManifest::from_json_file)
        .transpose()?;
    ExperimentManifest::resolve(command, inv.fields, file, inv.out)
}

/// Runs one command and writes its artifacts.
pub fn run(manifest: &ExperimentManifest) -> Result<()> {
    for artifact in execute(manifest)? {
        artifact.write()?;
    }
    Ok(())
}
