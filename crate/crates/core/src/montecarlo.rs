//! Shot-by-shot simulation of heralded PDC sources.
//!
//! Each trial draws the pair number of all `q` sources of a scheme and checks
//! whether exactly `n` heralds clicked. Trial `t` consumes exactly `q` 64-bit
//! words, starting at word `2·q·t` of the ChaCha stream, so any split of the
//! trial range over workers reproduces the same tallies.

use std::num::NonZeroUsize;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSeed;
use crate::source::{herald_probability, p_single_given_herald, snr_at, success_probability, PdcSource, SchemeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorModel {
    /// Click / no click; multi-photon heralds are indistinguishable from singles.
    #[default]
    Threshold,
    /// Counts photons; a trial is valid only if exactly `n` sources emitted one
    /// photon each and none emitted more.
    NumberResolving,
}

/// Inverse-CDF draw from `P(i) = (1−λ²)·λ^{2i}`; always consumes one `u64`.
pub fn geometric_photon_count<R: Rng + ?Sized>(src: &PdcSource, rng: &mut R) -> u32 {
    let u = 1.0 - rng.random::<f64>(); // (0, 1]
    let l2 = src.lambda_sq();
    if l2 == 0.0 {
        return 0;
    }
    // P(N >= i) = λ^{2i}
    (u.ln() / l2.ln()).floor() as u32
}

/// One simulated shot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub photon_counts: Vec<u32>,
    pub valid: bool,
    pub noisy: bool,
}

impl TrialRecord {
    pub fn classify(photon_counts: Vec<u32>, n: u64, detector: DetectorModel) -> Self {
        let fired = photon_counts.iter().filter(|&&c| c >= 1).count() as u64;
        let multi = photon_counts.iter().any(|&c| c >= 2);
        let (valid, noisy) = match detector {
            DetectorModel::Threshold => (fired == n, fired == n && multi),
            DetectorModel::NumberResolving => (fired == n && !multi, false),
        };
        Self {
            photon_counts,
            valid,
            noisy,
        }
    }

    pub fn herald_pattern(&self) -> Vec<bool> {
        self.photon_counts.iter().map(|&c| c >= 1).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    pub shots: u64,
    pub seed: RandomSeed,
    pub workers: usize,
    pub detector: DetectorModel,
}

impl MonteCarloOptions {
    pub fn new(shots: u64, seed: RandomSeed) -> Self {
        Self {
            shots,
            seed,
            workers: default_workers(),
            detector: DetectorModel::Threshold,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn detector(mut self, detector: DetectorModel) -> Self {
        self.detector = detector;
        self
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub params: SchemeParams,
    pub lambda: f64,
    pub detector: DetectorModel,
    pub seed: RandomSeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub config: SimulationConfig,
    pub shots: u64,
    pub valid: u64,
    pub noisy: u64,
    pub clean: u64,
    /// `clean / shots`: exactly `n` sources fired and each held one photon.
    pub p_s: f64,
    pub p_s_err: f64,
    /// `valid / shots`: exactly `n` heralds clicked, whatever they held.
    pub p_herald: f64,
    pub p_herald_err: f64,
    /// `clean / noisy`; absent when no valid or no noisy trial was seen.
    pub snr: Option<f64>,
    pub snr_err: Option<f64>,
}

impl TrialSummary {
    /// Empirical `P(noise | valid)` and its binomial standard error.
    pub fn noise_given_valid(&self) -> Option<(f64, f64)> {
        if self.valid == 0 {
            return None;
        }
        let p = self.noisy as f64 / self.valid as f64;
        Some((p, (p * (1.0 - p) / self.valid as f64).sqrt()))
    }
}

/// Closed-form values next to their empirical counterparts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concordance {
    pub p_s_analytic: f64,
    pub p_s_z: f64,
    pub p_herald_analytic: f64,
    pub p_herald_z: f64,
    pub noise_given_valid: Option<f64>,
    pub noise_given_valid_analytic: f64,
    pub noise_z: Option<f64>,
    pub snr_analytic: f64,
    pub snr_z: Option<f64>,
}

fn z_score(empirical: f64, analytic: f64, err: f64) -> f64 {
    if err > 0.0 {
        (empirical - analytic) / err
    } else if empirical == analytic {
        0.0
    } else {
        f64::INFINITY
    }
}

impl Concordance {
    /// Threshold-detector predictions for `summary`'s configuration.
    pub fn of(summary: &TrialSummary) -> Self {
        let cfg = &summary.config;
        let src = PdcSource::new(cfg.lambda).expect("summary holds a validated source");
        let p_s_analytic = success_probability(&cfg.params, &src);
        let p_herald_analytic = match cfg.detector {
            DetectorModel::Threshold => herald_probability(&cfg.params, &src),
            DetectorModel::NumberResolving => p_s_analytic,
        };
        let noise_analytic = 1.0 - p_single_given_herald(&src).powi(cfg.params.n as i32);
        let snr_analytic = snr_at(cfg.params.n, &src);
        let noise = summary.noise_given_valid();
        Self {
            p_s_analytic,
            p_s_z: z_score(summary.p_s, p_s_analytic, summary.p_s_err),
            p_herald_analytic,
            p_herald_z: z_score(summary.p_herald, p_herald_analytic, summary.p_herald_err),
            noise_given_valid: noise.map(|(p, _)| p),
            noise_given_valid_analytic: noise_analytic,
            noise_z: noise.map(|(p, e)| z_score(p, noise_analytic, e)),
            snr_analytic,
            snr_z: summary
                .snr
                .zip(summary.snr_err)
                .map(|(s, e)| z_score(s, snr_analytic, e)),
        }
    }
}

/// Tallies `(valid, noisy)` for trials `range`.
fn run_range(p: &SchemeParams, src: &PdcSource, opts: &MonteCarloOptions, range: std::ops::Range<u64>) -> (u64, u64) {
    let sources = p.input_count() as usize;
    let words_per_trial = 2 * sources as u128;
    let mut rng = opts.seed.rng_at(words_per_trial * range.start as u128);
    let mut counts = vec![0u32; sources];
    let (mut valid, mut noisy) = (0, 0);
    for _ in range {
        for c in counts.iter_mut() {
            *c = geometric_photon_count(src, &mut rng);
        }
        let fired = counts.iter().filter(|&&c| c >= 1).count() as u64;
        let multi = counts.iter().any(|&c| c >= 2);
        match opts.detector {
            DetectorModel::Threshold if fired == p.n => {
                valid += 1;
                noisy += u64::from(multi);
            }
            DetectorModel::NumberResolving if fired == p.n && !multi => valid += 1,
            _ => {}
        }
    }
    (valid, noisy)
}

/// Individual trial records, for inspection; uses the same draws as [`simulate_trials`].
pub fn trial_records(
    p: &SchemeParams,
    src: &PdcSource,
    opts: &MonteCarloOptions,
    range: std::ops::Range<u64>,
) -> Vec<TrialRecord> {
    let sources = p.input_count() as usize;
    let mut rng = opts.seed.rng_at(2 * sources as u128 * range.start as u128);
    range
        .map(|_| {
            let counts = (0..sources).map(|_| geometric_photon_count(src, &mut rng)).collect();
            TrialRecord::classify(counts, p.n, opts.detector)
        })
        .collect()
}

pub fn simulate_trials(p: &SchemeParams, src: &PdcSource, opts: &MonteCarloOptions) -> Result<TrialSummary> {
    if opts.shots == 0 {
        return Err(Error::Domain("at least one shot is required".into()));
    }
    let workers = opts.workers.clamp(1, opts.shots.min(usize::MAX as u64) as usize) as u64;
    let per = opts.shots / workers;
    let extra = opts.shots % workers;
    let ranges: Vec<_> = (0..workers)
        .scan(0u64, |start, w| {
            let len = per + u64::from(w < extra);
            let r = *start..*start + len;
            *start += len;
            Some(r)
        })
        .collect();

    let tallies: Vec<(u64, u64)> = if ranges.len() == 1 {
        vec![run_range(p, src, opts, ranges[0].clone())]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = ranges
                .iter()
                .cloned()
                .map(|r| s.spawn(move || run_range(p, src, opts, r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let (valid, noisy) = tallies.iter().fold((0, 0), |(v, n), (a, b)| (v + a, n + b));
    let clean = valid - noisy;

    let shots = opts.shots;
    let binomial = |hits: u64| {
        let p = hits as f64 / shots as f64;
        (p, (p * (1.0 - p) / shots as f64).sqrt())
    };
    let (p_s, p_s_err) = binomial(clean);
    let (p_herald, p_herald_err) = binomial(valid);
    let (snr, snr_err) = if valid > 0 && noisy > 0 {
        let frac = clean as f64 / valid as f64;
        let frac_err = (frac * (1.0 - frac) / valid as f64).sqrt();
        (Some(clean as f64 / noisy as f64), Some(frac_err / (1.0 - frac).powi(2)))
    } else {
        (None, None)
    };

    Ok(TrialSummary {
        config: SimulationConfig {
            params: *p,
            lambda: src.lambda(),
            detector: opts.detector,
            seed: opts.seed,
        },
        shots,
        valid,
        noisy,
        clean,
        p_s,
        p_s_err,
        p_herald,
        p_herald_err,
        snr,
        snr_err,
    })
}
