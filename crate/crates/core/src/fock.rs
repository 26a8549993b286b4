//! Exact output statistics of photons injected into the evolution matrix.
//!
//! For a binary input `S_in` and output `S_out` the unnormalized weight is
//! `|Per(M[S_out|S_in])|² / ∏_j t_j!`. Summed over every output with the same
//! photon number this equals `Per(V†V)` where `V` holds the selected columns
//! of `M`; that total is the normalizer. It is exactly 1 when all photons
//! enter through one unitary block, and differs from 1 when the columns come
//! from different blocks and are not mutually orthogonal. Dividing by it is
//! the post-selected model used here for occupied-link injection.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_matrix, permanent};
use crate::network::{submatrix, EvolutionMatrix};
use crate::rng::RandomSeed;

/// Largest photon number accepted by [`outcome_weight`].
pub const MAX_WEIGHT_PHOTONS: usize = 12;
/// Largest photon number accepted by [`full_distribution`].
pub const MAX_ENUMERATED_PHOTONS: usize = 6;
/// Largest outcome space [`full_distribution`] will enumerate.
pub const MAX_OUTCOMES: u64 = 1_000_000;
/// Agreement required between the summed weights and the Gram permanent.
pub const NORMALIZER_TOL: f64 = 1e-8;

/// Photon counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// A single photon in `mode`.
    pub fn unit(len: usize, mode: usize) -> Self {
        let mut v = Self::vacuum(len);
        v.0[mode] = 1;
        v
    }

    /// Binary occupation with one photon in each listed mode.
    pub fn from_modes(len: usize, modes: &[usize]) -> Result<Self> {
        let mut v = Self::vacuum(len);
        for &mode in modes {
            let slot =
                v.0.get_mut(mode)
                    .ok_or_else(|| Error::Index(format!("mode {mode} of {len}")))?;
            if *slot == 1 {
                return Err(Error::Configuration(format!("mode {mode} listed twice")));
            }
            *slot = 1;
        }
        Ok(v)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Each mode repeated by its count, ascending.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
            .collect()
    }

    /// `∏_j counts[j]!`
    pub fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (1..=c).map(f64::from).product::<f64>())
            .product()
    }
}

impl fmt::Display for OccupationVector {
    /// Dash-separated counts, e.g. `2-0-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for OccupationVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split('-')
            .map(|c| {
                c.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Usage(format!("bad occupation {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// All length-`modes` occupations with `photons` in total, in descending
/// lexicographic order (`n-0-…-0` first, `0-…-0-n` last).
pub fn enumerate_outcomes(modes: usize, photons: usize) -> Vec<OccupationVector> {
    let mut out = Vec::new();
    if modes == 0 {
        if photons == 0 {
            out.push(OccupationVector::vacuum(0));
        }
        return out;
    }
    let mut v = vec![0u32; modes];
    v[0] = photons as u32;
    loop {
        out.push(OccupationVector(v.clone()));
        let Some(i) = (0..modes - 1).rev().find(|&i| v[i] > 0) else {
            break;
        };
        let tail: u32 = v[i + 1..].iter().sum();
        v[i] -= 1;
        v[i + 1..].fill(0);
        v[i + 1] = tail + 1;
    }
    out
}

/// `C(modes + photons − 1, photons)`, saturating.
pub fn outcome_count(modes: usize, photons: usize) -> u64 {
    if modes == 0 {
        return u64::from(photons == 0);
    }
    let (n, r) = ((modes + photons - 1) as u128, photons.min(modes - 1) as u128);
    let mut acc: u128 = 1;
    for i in 1..=r {
        acc = acc * (n - r + i) / i;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Unnormalized probability `|Per(M[S_out|S_in])|² / ∏ t_j!`.
pub fn outcome_weight(ev: &EvolutionMatrix, s_in: &OccupationVector, s_out: &OccupationVector) -> Result<f64> {
    let n = s_in.total();
    if n != s_out.total() {
        return Err(Error::Conservation {
            input: n,
            output: s_out.total(),
        });
    }
    if n > MAX_WEIGHT_PHOTONS {
        return Err(Error::SizeLimit(format!(
            "outcome weights limited to {MAX_WEIGHT_PHOTONS} photons, got {n}"
        )));
    }
    let sub = submatrix(ev, s_in, s_out)?;
    Ok(permanent(&sub)?.norm_sqr() / s_out.factorial_product())
}

/// `Per(V†V)` for the columns selected by `s_in`: the total weight over all outputs.
pub fn gram_normalizer(ev: &EvolutionMatrix, s_in: &OccupationVector) -> Result<f64> {
    if s_in.len() != ev.inputs() {
        return Err(Error::Dimension(format!(
            "input occupation has length {}, expected {}",
            s_in.len(),
            ev.inputs()
        )));
    }
    let v = ev.columns(&s_in.mode_list())?;
    Ok(permanent(&gram_matrix(&v))?.re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<(OccupationVector, f64)>,
    normalizer: f64,
}

impl OutcomeDistribution {
    pub fn entries(&self) -> &[(OccupationVector, f64)] {
        &self.entries
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, outcome: &OccupationVector) -> f64 {
        self.entries.iter().find(|(o, _)| o == outcome).map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Inverse-CDF draws in enumeration order.
    pub fn sample(&self, shots: usize, seed: RandomSeed) -> Vec<OccupationVector> {
        let mut cdf = Vec::with_capacity(self.entries.len());
        let mut acc = 0.0;
        for (_, p) in &self.entries {
            acc += p;
            cdf.push(acc);
        }
        let last = self.entries.len().saturating_sub(1);
        let mut rng = seed.rng();
        (0..shots)
            .map(|_| {
                let u = rng.random::<f64>() * acc;
                let i = cdf.partition_point(|&c| c <= u).min(last);
                self.entries[i].0.clone()
            })
            .collect()
    }

    /// CSV with header `occupation,probability`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "occupation,probability")?;
        for (o, p) in &self.entries {
            writeln!(w, "{o},{p:.17e}")?;
        }
        Ok(())
    }
}

pub fn full_distribution(ev: &EvolutionMatrix, s_in: &OccupationVector) -> Result<OutcomeDistribution> {
    let n = s_in.total();
    if n > MAX_ENUMERATED_PHOTONS {
        return Err(Error::SizeLimit(format!(
            "exact distributions limited to {MAX_ENUMERATED_PHOTONS} photons, got {n}"
        )));
    }
    let count = outcome_count(ev.m(), n);
    if count > MAX_OUTCOMES {
        return Err(Error::SizeLimit(format!(
            "{count} outcomes exceeds the enumeration limit of {MAX_OUTCOMES}"
        )));
    }
    let outcomes = enumerate_outcomes(ev.m(), n);
    let weights = outcomes
        .par_iter()
        .map(|o| outcome_weight(ev, s_in, o))
        .collect::<Result<Vec<f64>>>()?;
    let normalizer: f64 = weights.iter().sum();

    let gram = gram_normalizer(ev, s_in)?;
    if (normalizer - gram).abs() > NORMALIZER_TOL {
        return Err(Error::Numeric(format!(
            "summed weights {normalizer} disagree with Gram permanent {gram}"
        )));
    }
    if normalizer.is_nan() || normalizer <= 0.0 {
        return Err(Error::Numeric(format!("non-positive normalizer {normalizer}")));
    }
    let entries = outcomes
        .into_iter()
        .zip(weights)
        .map(|(o, w)| (o, w / normalizer))
        .collect();
    Ok(OutcomeDistribution { entries, normalizer })
}

pub fn sample_outcomes(
    ev: &EvolutionMatrix,
    s_in: &OccupationVector,
    shots: usize,
    seed: RandomSeed,
) -> Result<Vec<OccupationVector>> {
    Ok(full_distribution(ev, s_in)?.sample(shots, seed))
}

/// Sampled shots as CSV with header `shot,occupation`.
pub fn write_shots_csv<W: Write>(shots: &[OccupationVector], mut w: W) -> std::io::Result<()> {
    writeln!(w, "shot,occupation")?;
    for (i, o) in shots.iter().enumerate() {
        writeln!(w, "{i},{o}")?;
    }
    Ok(())
}
