//! Heralded PDC sources and scheme-level rates.
//!
//! A source with squeezing `λ` emits `i` pairs with probability
//! `(1−λ²)·λ^{2i}`. With `q` possible input positions, the chance that exactly
//! `n` of them fire one photon and the rest stay dark is
//! `C(q, n)·P₁ⁿ·P₀^{q−n}`, where `q = n` (fixed inputs), `m` (scattershot) or
//! `k·m` (driven). Everything is evaluated in log space so that `q` can reach
//! the tens of millions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Linear-space results below `e^{-700}` are reported as zero.
pub const UNDERFLOW_LN: f64 = -700.0;

/// Above this many terms `ln C(N, r)` switches from an exact log-sum to log-gamma.
const LN_BINOMIAL_SUM_LIMIT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdcSource {
    lambda: f64,
}

impl PdcSource {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::Domain(format!("squeezing parameter {lambda} outside [0, 1)")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda * self.lambda
    }

    /// Probability of `i` emitted pairs.
    pub fn photon_number_probability(&self, i: u32) -> f64 {
        let l2 = self.lambda_sq();
        (1.0 - l2) * l2.powi(i as i32)
    }

    /// Photon-number law of the heralded state, `P(i | herald)` for `i ≥ 1`.
    pub fn heralded_probability(&self, i: u32) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let l2 = self.lambda_sq();
        (1.0 - l2) * l2.powi(i as i32 - 1)
    }
}

pub fn p_single(src: &PdcSource) -> f64 {
    let l2 = src.lambda_sq();
    (1.0 - l2) * l2
}

pub fn p_vacuum(src: &PdcSource) -> f64 {
    1.0 - src.lambda_sq()
}

/// Probability that a fired (heralded) source holds exactly one photon.
pub fn p_single_given_herald(src: &PdcSource) -> f64 {
    1.0 - src.lambda_sq()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    /// Standard boson sampling: `n` fixed, heralded inputs.
    Bs,
    /// Scattershot: a source on each of the `m` inputs.
    Sbs,
    /// Driven: a source on each of the `k·m` links of the generation network.
    Dbs,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Bs => "BS",
            Scheme::Sbs => "SBS",
            Scheme::Dbs => "DBS",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BS" => Ok(Scheme::Bs),
            "SBS" => Ok(Scheme::Sbs),
            "DBS" => Ok(Scheme::Dbs),
            _ => Err(Error::Usage(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub scheme: Scheme,
}

impl SchemeParams {
    pub fn new(scheme: Scheme, n: u64, m: u64, k: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Configuration("photon number must be at least 1".into()));
        }
        if m == 0 || k == 0 {
            return Err(Error::Configuration("m and k must be positive".into()));
        }
        if scheme == Scheme::Sbs && k != 1 {
            return Err(Error::Configuration(format!("scattershot has k = 1, got {k}")));
        }
        let p = Self { n, m, k, scheme };
        if n > p.input_count() {
            return Err(Error::Configuration(format!(
                "{n} photons exceed the {} possible inputs of {scheme}",
                p.input_count()
            )));
        }
        Ok(p)
    }

    pub fn bs(n: u64, m: u64) -> Result<Self> {
        Self::new(Scheme::Bs, n, m, 1)
    }

    pub fn sbs(n: u64, m: u64) -> Result<Self> {
        Self::new(Scheme::Sbs, n, m, 1)
    }

    pub fn dbs(n: u64, m: u64, k: u64) -> Result<Self> {
        Self::new(Scheme::Dbs, n, m, k)
    }

    /// Scattershot with `m = n²`.
    pub fn sbs_square(n: u64) -> Result<Self> {
        Self::sbs(n, n * n)
    }

    /// Driven with `m = n²` and `k = n`.
    pub fn dbs_square(n: u64) -> Result<Self> {
        Self::dbs(n, n * n, n)
    }

    /// Number of heralded sources that could fire.
    pub fn input_count(&self) -> u64 {
        match self.scheme {
            Scheme::Bs => self.n,
            Scheme::Sbs => self.m,
            Scheme::Dbs => self.k * self.m,
        }
    }
}

/// `ln C(total, chosen)`; `-∞` when `chosen > total`.
pub fn ln_binomial(total: u64, chosen: u64) -> f64 {
    if chosen > total {
        return f64::NEG_INFINITY;
    }
    let r = chosen.min(total - chosen);
    if r <= LN_BINOMIAL_SUM_LIMIT {
        (1..=r).map(|i| ((total - r + i) as f64 / i as f64).ln()).sum()
    } else {
        ln_gamma(total as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((total - r) as f64 + 1.0)
    }
}

fn from_ln(ln_p: f64) -> f64 {
    if ln_p < UNDERFLOW_LN {
        0.0
    } else {
        ln_p.exp()
    }
}

pub fn ln_success_probability(p: &SchemeParams, src: &PdcSource) -> f64 {
    let l2 = src.lambda_sq();
    let n = p.n as f64;
    let ln_p1 = l2.ln() + (-l2).ln_1p();
    match p.scheme {
        Scheme::Bs => n * ln_p1,
        Scheme::Sbs | Scheme::Dbs => {
            let q = p.input_count();
            ln_binomial(q, p.n) + n * ln_p1 + (q - p.n) as f64 * (-l2).ln_1p()
        }
    }
}

/// Probability that exactly `n` sources herald (and the rest are dark).
pub fn success_probability(p: &SchemeParams, src: &PdcSource) -> f64 {
    from_ln(ln_success_probability(p, src))
}

/// Probability that exactly `n` threshold heralds click, whatever the photon
/// numbers behind them: `C(q, n)·λ^{2n}·(1−λ²)^{q−n}`.
pub fn herald_probability(p: &SchemeParams, src: &PdcSource) -> f64 {
    let l2 = src.lambda_sq();
    let q = p.input_count();
    from_ln(ln_binomial(q, p.n) + p.n as f64 * l2.ln() + (q - p.n) as f64 * (-l2).ln_1p())
}

/// `√(n / (q + n))`, with `q` the number of possible inputs.
pub fn lambda_opt(p: &SchemeParams) -> f64 {
    let (n, q) = (p.n as f64, p.input_count() as f64);
    (n / (q + n)).sqrt()
}

/// Source tuned to [`lambda_opt`].
pub fn optimal_source(p: &SchemeParams) -> PdcSource {
    PdcSource::new(lambda_opt(p)).expect("optimal squeezing lies in [0, 1)")
}

/// Success probability at the optimal squeezing.
pub fn max_success_probability(p: &SchemeParams) -> f64 {
    success_probability(p, &optimal_source(p))
}

/// Signal-to-noise ratio of `n` heralds at squeezing `λ`:
/// `P₁|ₕⁿ / (1 − P₁|ₕⁿ)`. Infinite at `λ = 0`.
pub fn snr_at(n: u64, src: &PdcSource) -> f64 {
    let ln_clean = n as f64 * (-src.lambda_sq()).ln_1p();
    let noise = -ln_clean.exp_m1();
    if noise == 0.0 {
        return f64::INFINITY;
    }
    ln_clean.exp() / noise
}

/// Signal-to-noise ratio at the optimal squeezing,
/// `(q/(q+n))ⁿ / (1 − (q/(q+n))ⁿ)`.
pub fn snr(p: &SchemeParams) -> f64 {
    let (n, q) = (p.n as f64, p.input_count() as f64);
    let ln_clean = n * (-n / (q + n)).ln_1p();
    ln_clean.exp() / -ln_clean.exp_m1()
}

/// Smallest `m` with unit SNR for scattershot: `n / (2^{1/n} − 1)`.
pub fn min_modes_for_unit_snr(n: u64) -> f64 {
    n as f64 / (std::f64::consts::LN_2 / n as f64).exp_m1()
}

/// Smallest `k` with unit SNR when `m = n²`: `1 / (n (2^{1/n} − 1))`.
pub fn min_layers_for_unit_snr(n: u64) -> f64 {
    1.0 / (n as f64 * (std::f64::consts::LN_2 / n as f64).exp_m1())
}

/// Large-`n` optimal success probability, `1 / (b √(2π n))`.
pub fn asymptotic_pmax(n: u64, b: f64) -> f64 {
    1.0 / (b * (std::f64::consts::TAU * n as f64).sqrt())
}
