//! Experiment manifests.
//!
//! A manifest fully determines a command's output. It can be given as flags,
//! as a JSON file, or both; file values win and a differing flag is reported
//! on stderr.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::diagnostics::InputSelection;
use crate::error::{Error, Result};
use crate::montecarlo::DetectorModel;
use crate::network::GenerationNetwork;
use crate::source::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Rates,
    Lambda,
    Snr,
    Sample,
    Montecarlo,
    Bounds,
    Gauss,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_possible_value().expect("no skipped variants");
        f.write_str(s.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum UnitaryRule {
    #[default]
    Haar,
    Identity,
}

/// Network width: `n^2` or a fixed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeRule {
    #[default]
    Square,
    Fixed(u64),
}

impl ModeRule {
    pub fn resolve(self, n: u64) -> u64 {
        match self {
            ModeRule::Square => n * n,
            ModeRule::Fixed(m) => m,
        }
    }
}

/// Generation-network depth: `n` or a fixed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LayerRule {
    #[default]
    PhotonNumber,
    Fixed(u64),
}

impl LayerRule {
    pub fn resolve(self, n: u64) -> u64 {
        match self {
            LayerRule::PhotonNumber => n,
            LayerRule::Fixed(k) => k,
        }
    }
}

/// Squeezing: optimal for each `n`, optimal for a reference `n`, or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LambdaRule {
    #[default]
    Optimal,
    OptimalAt(u64),
    Fixed(f64),
}

impl FromStr for ModeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n^2" | "n2" | "square" => Ok(ModeRule::Square),
            v => v
                .parse()
                .map(ModeRule::Fixed)
                .map_err(|_| Error::Usage(format!("mode rule must be n^2 or an integer, got {s:?}"))),
        }
    }
}

impl fmt::Display for ModeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeRule::Square => f.write_str("n^2"),
            ModeRule::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for LayerRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n" => Ok(LayerRule::PhotonNumber),
            v => v
                .parse()
                .map(LayerRule::Fixed)
                .map_err(|_| Error::Usage(format!("layer rule must be n or an integer, got {s:?}"))),
        }
    }
}

impl fmt::Display for LayerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerRule::PhotonNumber => f.write_str("n"),
            LayerRule::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for LambdaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Usage(format!("lambda rule must be opt, opt@N or a number, got {s:?}"));
        if s == "opt" {
            return Ok(LambdaRule::Optimal);
        }
        if let Some(n) = s.strip_prefix("opt@") {
            return n.parse().map(LambdaRule::OptimalAt).map_err(|_| bad());
        }
        s.parse().map(LambdaRule::Fixed).map_err(|_| bad())
    }
}

impl fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaRule::Optimal => f.write_str("opt"),
            LambdaRule::OptimalAt(n) => write!(f, "opt@{n}"),
            LambdaRule::Fixed(l) => write!(f, "{l}"),
        }
    }
}

/// Rules are stored as strings in JSON but numbers are accepted on input.
macro_rules! string_rule_serde {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                #[derive(Deserialize)]
                #[serde(untagged)]
                enum Raw {
                    Num(serde_json::Number),
                    Str(String),
                }
                let text = match Raw::deserialize(d)? {
                    Raw::Num(n) => n.to_string(),
                    Raw::Str(s) => s,
                };
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    )*};
}

string_rule_serde!(ModeRule, LayerRule, LambdaRule);

fn parse_scheme(s: &str) -> Result<Scheme> {
    s.parse()
}

fn parse_detector(s: &str) -> Result<DetectorModel> {
    match s {
        "threshold" => Ok(DetectorModel::Threshold),
        "number-resolving" | "pnr" => Ok(DetectorModel::NumberResolving),
        _ => Err(Error::Usage(format!(
            "detector must be threshold or number-resolving, got {s:?}"
        ))),
    }
}

fn parse_selection(s: &str) -> Result<InputSelection> {
    match s {
        "any-block" | "any" => Ok(InputSelection::AnyBlock),
        "single-block" | "single" => Ok(InputSelection::SingleBlock),
        _ => Err(Error::Usage(format!(
            "selection must be any-block or single-block, got {s:?}"
        ))),
    }
}

/// Every manifest field, all optional. Used both for command-line flags and
/// for the JSON manifest file, which are then merged.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFields {
    /// Command named in a manifest file.
    #[arg(skip)]
    #[serde(default)]
    pub command: Option<Command>,
    /// Fixed photon number.
    #[arg(long)]
    #[serde(default)]
    pub n: Option<u64>,
    /// First photon number of a sweep (inclusive).
    #[arg(long)]
    #[serde(default)]
    pub n_min: Option<u64>,
    /// Last photon number of a sweep (inclusive).
    #[arg(long)]
    #[serde(default)]
    pub n_max: Option<u64>,
    /// Network width: `n^2` or an integer.
    #[arg(long)]
    #[serde(default)]
    pub m: Option<ModeRule>,
    /// Generation layers for driven sampling: `n` or an integer.
    #[arg(long)]
    #[serde(default)]
    pub k: Option<LayerRule>,
    /// Squeezing: `opt`, `opt@N` or a value in [0, 1).
    #[arg(long)]
    #[serde(default)]
    pub lambda: Option<LambdaRule>,
    /// Scheme for montecarlo (BS, SBS or DBS).
    #[arg(long, value_parser = parse_scheme)]
    #[serde(default)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    #[serde(default)]
    pub shots: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub stream: Option<u64>,
    /// Submatrix draws for gauss.
    #[arg(long)]
    #[serde(default)]
    pub draws: Option<usize>,
    /// Input column selection for gauss: any-block or single-block.
    #[arg(long, value_parser = parse_selection)]
    #[serde(default)]
    pub selection: Option<InputSelection>,
    /// Herald detector model for montecarlo: threshold or number-resolving.
    #[arg(long, value_parser = parse_detector)]
    #[serde(default)]
    pub detector: Option<DetectorModel>,
    /// Common angle for every beam splitter (sample); random angles otherwise.
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    /// Second network: haar or identity.
    #[arg(long, value_enum)]
    #[serde(default)]
    pub unitary: Option<UnitaryRule>,
    /// Occupied input columns (0-based, comma separated) for sample.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub input: Option<Vec<usize>>,
    /// Explicit generation network document (manifest files only).
    #[arg(skip)]
    #[serde(default)]
    pub network: Option<GenerationNetwork>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// Fully resolved manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub command: Command,
    pub n: Option<u64>,
    pub n_min: Option<u64>,
    pub n_max: Option<u64>,
    pub m: ModeRule,
    pub k: LayerRule,
    pub lambda: LambdaRule,
    pub scheme: Scheme,
    pub shots: u64,
    pub seed: u64,
    pub stream: u64,
    pub draws: usize,
    pub selection: InputSelection,
    pub detector: DetectorModel,
    pub theta: Option<f64>,
    pub unitary: UnitaryRule,
    pub input: Option<Vec<usize>>,
    pub network: Option<GenerationNetwork>,
    pub format: OutputFormat,
    /// Where results go; not part of the manifest hash.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl ExperimentManifest {
    pub fn new(command: Command) -> Self {
        Self::resolve(command, ManifestFields::default(), None, None).expect("defaults are consistent")
    }

    /// Merges flag values with an optional manifest file (file wins).
    /// Returns the manifest; conflicts are written to stderr.
    pub fn resolve(
        command: Command,
        flags: ManifestFields,
        file: Option<ManifestFields>,
        output: Option<PathBuf>,
    ) -> Result<Self> {
        let (merged, warnings) = merge(flags, file.unwrap_or_default());
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        let command = match merged.command {
            Some(c) if c != command => {
                eprintln!("warning: manifest file names command {c}, overriding {command}");
                c
            }
            _ => command,
        };
        Ok(Self {
            command,
            n: merged.n,
            n_min: merged.n_min,
            n_max: merged.n_max,
            m: merged.m.unwrap_or_default(),
            k: merged.k.unwrap_or_default(),
            lambda: merged.lambda.unwrap_or_default(),
            scheme: merged.scheme.unwrap_or(Scheme::Dbs),
            shots: merged.shots.unwrap_or(100_000),
            seed: merged.seed.unwrap_or(0),
            stream: merged.stream.unwrap_or(0),
            draws: merged.draws.unwrap_or(500),
            selection: merged.selection.unwrap_or_default(),
            detector: merged.detector.unwrap_or_default(),
            theta: merged.theta,
            unitary: merged.unitary.unwrap_or_default(),
            input: merged.input,
            network: merged.network,
            format: merged.format.unwrap_or(match command {
                Command::Montecarlo => OutputFormat::Json,
                _ => OutputFormat::Csv,
            }),
            output,
        })
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<ManifestFields> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Usage(format!("manifest {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// SHA-256 of the canonical JSON form (output path excluded).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("manifest serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Photon numbers to sweep: `n` alone, or `n_min..=n_max`.
    pub fn photon_numbers(&self) -> Result<std::ops::RangeInclusive<u64>> {
        match (self.n, self.n_min, self.n_max) {
            (Some(n), None, None) if n >= 1 => Ok(n..=n),
            (None, Some(a), Some(b)) if a >= 1 && a <= b => Ok(a..=b),
            (None, None, None) => Err(Error::Usage("give --n or --n-min and --n-max".into())),
            _ => Err(Error::Usage(format!(
                "invalid photon range: n={:?}, n-min={:?}, n-max={:?}",
                self.n, self.n_min, self.n_max
            ))),
        }
    }

    pub fn fixed_n(&self) -> Result<u64> {
        let range = self.photon_numbers()?;
        if range.start() != range.end() {
            return Err(Error::Usage(format!("{} needs a single --n", self.command)));
        }
        Ok(*range.start())
    }
}

fn merge(flags: ManifestFields, file: ManifestFields) -> (ManifestFields, Vec<String>) {
    let mut warnings = Vec::new();
    macro_rules! pick {
        ($($field:ident),*) => {
            ManifestFields {
                $($field: match (flags.$field, file.$field) {
                    (Some(f), Some(m)) => {
                        if f != m {
                            warnings.push(format!(
                                "--{} from the command line ignored; manifest file value wins",
                                stringify!($field).replace('_', "-")
                            ));
                        }
                        Some(m)
                    }
                    (f, m) => m.or(f),
                },)*
            }
        };
    }
    let merged = pick!(
        command, n, n_min, n_max, m, k, lambda, scheme, shots, seed, stream, draws, selection, detector, theta,
        unitary, input, network, format
    );
    (merged, warnings)
}
