//! The figure-data and simulation commands. Each one is a pure function from a
//! resolved manifest to a list of output artifacts.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::manifest::{Command, ExperimentManifest, LambdaRule, OutputFormat, UnitaryRule};
use crate::diagnostics::{submatrix_element_test, write_reports_csv, KsReport};
use crate::error::{Error, Result};
use crate::fock::{full_distribution, write_shots_csv, OccupationVector, OutcomeDistribution};
use crate::linalg::{haar_unitary, ComplexAmplitudeMatrix};
use crate::montecarlo::{simulate_trials, Concordance, MonteCarloOptions, TrialSummary};
use crate::network::{evolution_matrix, random_network, GenerationNetwork};
use crate::rng::RandomSeed;
use crate::source::{
    asymptotic_pmax, lambda_opt, max_success_probability, min_layers_for_unit_snr, min_modes_for_unit_snr, snr_at,
    success_probability, PdcSource, Scheme, SchemeParams,
};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "DBSIM_WORKERS";

/// One file produced by a command; `path = None` means standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

impl Artifact {
    pub fn write(&self) -> Result<()> {
        match &self.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(p, &self.contents)?;
            }
            None => {
                use std::io::Write;
                std::io::stdout().write_all(self.contents.as_bytes())?;
            }
        }
        Ok(())
    }
}

/// Worker count from the environment, else available parallelism.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Error::Usage(format!(
                "{WORKERS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(crate::montecarlo::default_workers()),
    }
}

pub fn execute(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    match manifest.command {
        Command::Rates => cmd_rates(manifest),
        Command::Lambda => cmd_lambda(manifest),
        Command::Snr => cmd_snr(manifest),
        Command::Sample => cmd_sample(manifest),
        Command::Montecarlo => cmd_montecarlo(manifest, workers_from_env()?),
        Command::Bounds => cmd_bounds(manifest),
        Command::Gauss => cmd_gauss(manifest),
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn render(&self, manifest: &ExperimentManifest) -> String {
        match manifest.format {
            OutputFormat::Csv => {
                let mut out = csv_preamble(manifest);
                out.push_str(&self.header.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                json_document(manifest, json!({ "rows": rows }))
            }
        }
    }
}

fn csv_preamble(manifest: &ExperimentManifest) -> String {
    format!("# manifest sha256={}\n", manifest.hash())
}

fn json_document(manifest: &ExperimentManifest, body: Value) -> String {
    let mut doc = Map::new();
    doc.insert("manifest_sha256".into(), json!(manifest.hash()));
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json serializes");
    s.push('\n');
    s
}

fn single(manifest: &ExperimentManifest, contents: String) -> Vec<Artifact> {
    vec![Artifact {
        path: manifest.output.clone(),
        contents,
    }]
}

/// Scheme parameters at photon number `n` under the manifest's m/k rules.
fn params_at(manifest: &ExperimentManifest, scheme: Scheme, n: u64) -> Result<SchemeParams> {
    let m = manifest.m.resolve(n);
    match scheme {
        Scheme::Bs => SchemeParams::bs(n, m),
        Scheme::Sbs => SchemeParams::sbs(n, m),
        Scheme::Dbs => SchemeParams::dbs(n, m, manifest.k.resolve(n)),
    }
}

/// Squeezing for `scheme` at `n`; `None` when the rule is plain `opt`.
fn fixed_lambda(manifest: &ExperimentManifest, scheme: Scheme) -> Result<Option<f64>> {
    match manifest.lambda {
        LambdaRule::Optimal => Ok(None),
        LambdaRule::OptimalAt(n_ref) => Ok(Some(lambda_opt(&params_at(manifest, scheme, n_ref)?))),
        LambdaRule::Fixed(l) => {
            PdcSource::new(l)?;
            Ok(Some(l))
        }
    }
}

fn lambda_for(manifest: &ExperimentManifest, p: &SchemeParams) -> Result<f64> {
    Ok(fixed_lambda(manifest, p.scheme)?.unwrap_or_else(|| lambda_opt(p)))
}

const FIGURE_SCHEMES: [Scheme; 2] = [Scheme::Sbs, Scheme::Dbs];

pub fn cmd_rates(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    let ns = manifest.photon_numbers()?;
    let mut rows = Vec::new();
    for n in ns {
        for scheme in FIGURE_SCHEMES {
            let p = params_at(manifest, scheme, n)?;
            rows.push(vec![
                Cell::Int(n),
                Cell::Text(scheme.to_string()),
                Cell::Float(lambda_opt(&p)),
                Cell::Float(max_success_probability(&p)),
            ]);
        }
        for scheme in FIGURE_SCHEMES {
            if let Some(l) = fixed_lambda(manifest, scheme)? {
                let p = params_at(manifest, scheme, n)?;
                rows.push(vec![
                    Cell::Int(n),
                    Cell::Text(format!("{scheme}-fixed")),
                    Cell::Float(l),
                    Cell::Float(success_probability(&p, &PdcSource::new(l)?)),
                ]);
            }
        }
    }
    let table = Table {
        header: &["n", "scheme", "lambda", "p_success"],
        rows,
    };
    Ok(single(manifest, table.render(manifest)))
}

pub fn cmd_lambda(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    let mut rows = Vec::new();
    for n in manifest.photon_numbers()? {
        for scheme in FIGURE_SCHEMES {
            let p = params_at(manifest, scheme, n)?;
            rows.push(vec![
                Cell::Int(n),
                Cell::Text(scheme.to_string()),
                Cell::Float(lambda_opt(&p)),
            ]);
        }
    }
    let table = Table {
        header: &["n", "scheme", "lambda_opt"],
        rows,
    };
    Ok(single(manifest, table.render(manifest)))
}

pub fn cmd_snr(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    let mut rows = Vec::new();
    for n in manifest.photon_numbers()? {
        for scheme in FIGURE_SCHEMES {
            let p = params_at(manifest, scheme, n)?;
            let src = PdcSource::new(lambda_for(manifest, &p)?)?;
            rows.push(vec![
                Cell::Int(n),
                Cell::Text(scheme.to_string()),
                Cell::Float(snr_at(n, &src)),
            ]);
        }
    }
    let table = Table {
        header: &["n", "scheme", "snr"],
        rows,
    };
    Ok(single(manifest, table.render(manifest)))
}

pub fn cmd_bounds(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    let mut rows = Vec::new();
    for n in manifest.photon_numbers()? {
        let sbs = max_success_probability(&params_at(manifest, Scheme::Sbs, n)?);
        let dbs = max_success_probability(&params_at(manifest, Scheme::Dbs, n)?);
        rows.push(vec![
            Cell::Int(n),
            Cell::Float(min_modes_for_unit_snr(n)),
            Cell::Float(min_layers_for_unit_snr(n)),
            Cell::Float(asymptotic_pmax(n, 1.0)),
            Cell::Float(asymptotic_pmax(n, std::f64::consts::E)),
            Cell::Float(sbs),
            Cell::Float(dbs),
            Cell::Float(dbs / sbs),
        ]);
    }
    let table = Table {
        header: &[
            "n",
            "min_m",
            "min_k",
            "asymptote_b1",
            "asymptote_be",
            "exact_pmax_sbs",
            "exact_pmax_dbs",
            "ratio",
        ],
        rows,
    };
    Ok(single(manifest, table.render(manifest)))
}

/// Seed for one purpose (network, unitary, sampling) within the manifest stream.
fn purpose_seed(manifest: &ExperimentManifest, purpose: u64) -> RandomSeed {
    RandomSeed::with_stream(manifest.seed, manifest.stream.wrapping_mul(8).wrapping_add(purpose))
}

fn to_usize(v: u64, what: &str) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::SizeLimit(format!("{what} = {v} does not fit in memory")))
}

/// Builds the generation network and second unitary a manifest describes.
fn build_experiment(manifest: &ExperimentManifest, n: u64) -> Result<(GenerationNetwork, ComplexAmplitudeMatrix)> {
    let net = match (&manifest.network, manifest.theta) {
        (Some(net), _) => net.clone(),
        (None, theta) => {
            let m = to_usize(manifest.m.resolve(n), "m")?;
            let k = to_usize(manifest.k.resolve(n), "k")?;
            match theta {
                Some(t) => GenerationNetwork::uniform(m, k, t)?,
                None => random_network(m, k, purpose_seed(manifest, 1))?,
            }
        }
    };
    let u_h = match manifest.unitary {
        UnitaryRule::Identity => ComplexAmplitudeMatrix::identity(net.m()),
        UnitaryRule::Haar => haar_unitary(net.m(), purpose_seed(manifest, 2))?,
    };
    Ok((net, u_h))
}

/// `dir/stem.tag.ext` next to `path`.
fn sibling(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn distribution_json(dist: &OutcomeDistribution) -> Value {
    let entries: Vec<Value> = dist
        .entries()
        .iter()
        .map(|(o, p)| json!({ "occupation": o.to_string(), "probability": p }))
        .collect();
    json!({ "normalizer": dist.normalizer(), "entries": entries })
}

pub fn cmd_sample(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    let out = manifest
        .output
        .clone()
        .ok_or_else(|| Error::Usage("sample writes several files and needs --out".into()))?;
    let n = match (&manifest.input, manifest.n, manifest.n_min, manifest.n_max) {
        (Some(cols), None, None, None) => cols.len() as u64,
        (Some(cols), _, _, _) => {
            let n = manifest.fixed_n()?;
            if n != cols.len() as u64 {
                return Err(Error::Usage(format!("n = {n} but {} input columns given", cols.len())));
            }
            n
        }
        (None, _, _, _) => manifest.fixed_n()?,
    };
    let (net, u_h) = build_experiment(manifest, n)?;
    let ev = evolution_matrix(&net, &u_h)?;
    let n = to_usize(n, "n")?;
    let cols: Vec<usize> = manifest.input.clone().unwrap_or_else(|| (0..n).collect());
    let s_in = OccupationVector::from_modes(ev.inputs(), &cols)?;
    if !s_in.is_binary() {
        return Err(Error::Usage("input columns must be distinct".into()));
    }
    let dist = full_distribution(&ev, &s_in)?;
    let shots = dist.sample(to_usize(manifest.shots, "shots")?, purpose_seed(manifest, 3));

    let ext = match manifest.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let (dist_text, shots_text) = match manifest.format {
        OutputFormat::Csv => {
            let mut d = csv_preamble(manifest).into_bytes();
            dist.write_csv(&mut d)?;
            let mut s = csv_preamble(manifest).into_bytes();
            write_shots_csv(&shots, &mut s)?;
            (
                String::from_utf8(d).expect("utf-8 csv"),
                String::from_utf8(s).expect("utf-8 csv"),
            )
        }
        OutputFormat::Json => {
            let shots: Vec<String> = shots.iter().map(ToString::to_string).collect();
            (
                json_document(manifest, distribution_json(&dist)),
                json_document(manifest, json!({ "shots": shots })),
            )
        }
    };
    let mut network = net.to_json()?;
    network.push('\n');
    let mut sidecar = manifest.to_json();
    sidecar.push('\n');
    Ok(vec![
        Artifact {
            path: Some(out.clone()),
            contents: dist_text,
        },
        Artifact {
            path: Some(sibling(&out, "shots", ext)),
            contents: shots_text,
        },
        Artifact {
            path: Some(sibling(&out, "network", "json")),
            contents: network,
        },
        Artifact {
            path: Some(sibling(&out, "manifest", "json")),
            contents: sidecar,
        },
    ])
}

fn montecarlo_params(manifest: &ExperimentManifest, n: u64) -> Result<SchemeParams> {
    match manifest.scheme {
        Scheme::Sbs => {
            let k = manifest.k.resolve(n);
            if matches!(manifest.k, super::manifest::LayerRule::Fixed(_)) && k != 1 {
                return Err(Error::Usage(format!("SBS has a single layer, got k = {k}")));
            }
            SchemeParams::sbs(n, manifest.m.resolve(n))
        }
        scheme => params_at(manifest, scheme, n),
    }
}

fn concordance_csv(manifest: &ExperimentManifest, s: &TrialSummary, c: &Concordance) -> String {
    let mut out = csv_preamble(manifest);
    out.push_str("quantity,empirical,standard_error,analytic,z\n");
    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
    let noise = s.noise_given_valid();
    let lines = [
        ("p_s", Some(s.p_s), Some(s.p_s_err), c.p_s_analytic, Some(c.p_s_z)),
        (
            "p_herald",
            Some(s.p_herald),
            Some(s.p_herald_err),
            c.p_herald_analytic,
            Some(c.p_herald_z),
        ),
        (
            "noise_given_valid",
            noise.map(|x| x.0),
            noise.map(|x| x.1),
            c.noise_given_valid_analytic,
            c.noise_z,
        ),
        ("snr", s.snr, s.snr_err, c.snr_analytic, c.snr_z),
    ];
    for (name, emp, err, analytic, z) in lines {
        out.push_str(&format!("{name},{},{},{analytic},{}\n", opt(emp), opt(err), opt(z)));
    }
    out
}

pub fn cmd_montecarlo(manifest: &ExperimentManifest, workers: usize) -> Result<Vec<Artifact>> {
    if manifest.shots == 0 {
        return Err(Error::Usage("montecarlo needs at least one shot".into()));
    }
    let n = manifest.fixed_n()?;
    let p = montecarlo_params(manifest, n)?;
    let src = PdcSource::new(lambda_for(manifest, &p)?)?;
    let opts = MonteCarloOptions::new(manifest.shots, purpose_seed(manifest, 0))
        .workers(workers)
        .detector(manifest.detector);
    let summary = simulate_trials(&p, &src, &opts)?;
    let analytic = Concordance::of(&summary);
    let contents = match manifest.format {
        OutputFormat::Json => json_document(manifest, json!({ "summary": summary, "analytic": analytic })),
        OutputFormat::Csv => concordance_csv(manifest, &summary, &analytic),
    };
    Ok(single(manifest, contents))
}

pub fn gauss_reports(manifest: &ExperimentManifest) -> Result<Vec<KsReport>> {
    let n = manifest.fixed_n()?;
    let (net, u_h) = build_experiment(manifest, n)?;
    let ev = evolution_matrix(&net, &u_h)?;
    submatrix_element_test(
        &ev,
        to_usize(n, "n")?,
        manifest.draws,
        manifest.selection,
        purpose_seed(manifest, 3),
    )
}

pub fn cmd_gauss(manifest: &ExperimentManifest) -> Result<Vec<Artifact>> {
    let reports = gauss_reports(manifest)?;
    let contents = match manifest.format {
        OutputFormat::Csv => {
            let mut buf = csv_preamble(manifest).into_bytes();
            write_reports_csv(&reports, &mut buf)?;
            String::from_utf8(buf).expect("utf-8 csv")
        }
        OutputFormat::Json => json_document(manifest, json!({ "reports": reports })),
    };
    Ok(single(manifest, contents))
}
