//! Element-level Gaussianity checks for submatrices of the evolution matrix.
//!
//! Entries of an `m × m` Haar unitary scaled by `√m` approach standard complex
//! Gaussians when `m ≫ n²`. These diagnostics pool the entries of many random
//! `n × n` submatrices and run one-sample Kolmogorov–Smirnov tests on the real
//! part, imaginary part (each against `N(0, 1/2)`) and squared modulus
//! (against `Exp(1)`). They test marginals only; they do not bound the total
//! variation distance between matrix ensembles.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg::ginibre;
use crate::network::EvolutionMatrix;
use crate::rng::RandomSeed;

pub const MIN_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    RealPart,
    ImaginaryPart,
    ModulusSquared,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::RealPart, Component::ImaginaryPart, Component::ModulusSquared];

    fn extract(self, z: Complex64) -> f64 {
        match self {
            Component::RealPart => z.re,
            Component::ImaginaryPart => z.im,
            Component::ModulusSquared => z.norm_sqr(),
        }
    }

    /// Reference CDF under the standard complex Gaussian.
    fn reference_cdf(self, x: f64) -> f64 {
        match self {
            // N(0, 1/2): Φ(x √2) = erfc(−x) / 2
            Component::RealPart | Component::ImaginaryPart => 0.5 * erfc(-x),
            Component::ModulusSquared => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::RealPart => "real-part",
            Component::ImaginaryPart => "imaginary-part",
            Component::ModulusSquared => "modulus-squared",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub component: Component,
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
}

impl KsReport {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Asymptotic Kolmogorov survival function `P(K > x)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi-theta form converges fast for small x
        let y = -PI * PI / (8.0 * x * x);
        let s: f64 = (1..=7).map(|j| (y * ((2 * j - 1) * (2 * j - 1)) as f64).exp()).sum();
        (1.0 - (2.0 * PI).sqrt() / x * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (j * j) as f64 * x * x).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Largest gap between the empirical CDF of `samples` and `cdf`. Sorts in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// p-value with the usual small-sample correction to the argument.
pub fn ks_p_value(statistic: f64, n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    kolmogorov_survival((rn + 0.12 + 0.11 / rn) * statistic)
}

pub fn ks_test(component: Component, values: &[Complex64]) -> KsReport {
    let mut xs: Vec<f64> = values.iter().map(|&z| component.extract(z)).collect();
    let statistic = ks_statistic(&mut xs, |x| component.reference_cdf(x));
    KsReport {
        component,
        statistic,
        p_value: ks_p_value(statistic, xs.len()),
        sample_size: xs.len(),
    }
}

/// All three component tests on already scaled entries.
pub fn gaussian_reports(values: &[Complex64]) -> Vec<KsReport> {
    Component::ALL.iter().map(|&c| ks_test(c, values)).collect()
}

/// The same tests on `samples` synthetic i.i.d. standard complex Gaussians.
pub fn null_model_reports(samples: usize, seed: RandomSeed) -> Vec<KsReport> {
    let mut rng = seed.rng();
    let z = ginibre(1, samples, &mut rng);
    gaussian_reports(z.as_slice())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSelection {
    /// Distinct columns anywhere among the `k·m` virtual inputs.
    #[default]
    AnyBlock,
    /// Distinct columns from one randomly chosen block.
    SingleBlock,
}

/// Pooled `√m`-scaled entries of `draws` random collision-free `n × n` submatrices.
pub fn collect_submatrix_entries(
    ev: &EvolutionMatrix,
    n: usize,
    draws: usize,
    selection: InputSelection,
    seed: RandomSeed,
) -> Result<Vec<Complex64>> {
    let m = ev.m();
    if n == 0 || n * n > m / 4 {
        return Err(Error::Configuration(format!(
            "need 1 <= n and n^2 <= m/4 for element statistics, got n = {n}, m = {m}"
        )));
    }
    if draws < MIN_DRAWS {
        return Err(Error::Configuration(format!(
            "need at least {MIN_DRAWS} draws, got {draws}"
        )));
    }
    let scale = (m as f64).sqrt();
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(draws * n * n);
    for _ in 0..draws {
        let cols: Vec<usize> = match selection {
            InputSelection::AnyBlock => sample(&mut rng, ev.inputs(), n).into_vec(),
            InputSelection::SingleBlock => {
                let q = rng.random_range(1..=ev.k());
                sample(&mut rng, m, n).iter().map(|j| ev.column_index(q, j)).collect()
            }
        };
        let rows = sample(&mut rng, m, n).into_vec();
        for &r in &rows {
            for &c in &cols {
                out.push(ev.entry(r, c) * scale);
            }
        }
    }
    Ok(out)
}

pub fn submatrix_element_test(
    ev: &EvolutionMatrix,
    n: usize,
    draws: usize,
    selection: InputSelection,
    seed: RandomSeed,
) -> Result<Vec<KsReport>> {
    let entries = collect_submatrix_entries(ev, n, draws, selection, seed)?;
    Ok(gaussian_reports(&entries))
}

/// CSV with header `component,statistic,pvalue,samples`.
pub fn write_reports_csv<W: Write>(reports: &[KsReport], mut w: W) -> std::io::Result<()> {
    writeln!(w, "component,statistic,pvalue,samples")?;
    for r in reports {
        writeln!(
            w,
            "{},{:.17e},{:.17e},{}",
            r.component, r.statistic, r.p_value, r.sample_size
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, ComplexAmplitudeMatrix};
    use crate::network::{evolution_matrix, random_network, GenerationNetwork};

    #[test]
    fn survival_function_reference_points() {
        // critical values of the Kolmogorov distribution
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-3);
        assert!((kolmogorov_survival(0.8276) - 0.5).abs() < 2e-3);
        // both branches meet smoothly
        assert!((kolmogorov_survival(1.1799) - kolmogorov_survival(1.1801)).abs() < 1e-3);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(5.0) < 1e-20);
    }

    #[test]
    fn statistic_of_exact_quantiles_is_small() {
        // midpoints of n equal-probability bins give D = 1/(2n)
        let n = 200;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn shifted_sample_is_rejected() {
        let mut rng = RandomSeed::new(1).rng();
        let z = ginibre(1, 2000, &mut rng);
        let shifted: Vec<Complex64> = z.as_slice().iter().map(|w| w + Complex64::new(0.3, 0.0)).collect();
        let r = ks_test(Component::RealPart, &shifted);
        assert!(r.p_value < 1e-6, "{r:?}");
        let r = ks_test(Component::ImaginaryPart, &shifted);
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn null_model_passes() {
        for r in null_model_reports(4500, RandomSeed::new(17)) {
            assert!(r.p_value > 0.01, "{r:?}");
            assert!((0.0..=1.0).contains(&r.statistic));
            assert_eq!(r.sample_size, 4500);
        }
    }

    #[test]
    fn dilution_and_draw_preconditions() {
        let net = GenerationNetwork::uniform(4, 1, 0.0).unwrap();
        let ev = evolution_matrix(&net, &ComplexAmplitudeMatrix::identity(4)).unwrap();
        assert!(matches!(
            submatrix_element_test(&ev, 2, 500, InputSelection::AnyBlock, RandomSeed::new(1)),
            Err(Error::Configuration(_))
        ));
        let net = random_network(16, 2, RandomSeed::new(1)).unwrap();
        let ev = evolution_matrix(&net, &haar_unitary(16, RandomSeed::new(2)).unwrap()).unwrap();
        assert!(submatrix_element_test(&ev, 2, 99, InputSelection::AnyBlock, RandomSeed::new(1)).is_err());
        assert!(submatrix_element_test(&ev, 2, 100, InputSelection::AnyBlock, RandomSeed::new(1)).is_ok());
    }

    #[test]
    fn identity_evolution_fails_badly() {
        // a permutation-like matrix is nothing like a Gaussian
        let net = GenerationNetwork::uniform(64, 2, 0.0).unwrap();
        let ev = evolution_matrix(&net, &ComplexAmplitudeMatrix::identity(64)).unwrap();
        let reports = submatrix_element_test(&ev, 2, 200, InputSelection::AnyBlock, RandomSeed::new(3)).unwrap();
        assert!(reports.iter().all(|r| r.p_value < 1e-6));
    }

    #[test]
    fn single_block_columns_stay_in_one_block() {
        let net = random_network(16, 4, RandomSeed::new(4)).unwrap();
        let ev = evolution_matrix(&net, &haar_unitary(16, RandomSeed::new(5)).unwrap()).unwrap();
        let a = collect_submatrix_entries(&ev, 2, 100, InputSelection::SingleBlock, RandomSeed::new(6)).unwrap();
        let b = collect_submatrix_entries(&ev, 2, 100, InputSelection::SingleBlock, RandomSeed::new(6)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 400);
    }

    #[test]
    fn csv_layout() {
        let reports = null_model_reports(500, RandomSeed::new(2));
        let mut buf = Vec::new();
        write_reports_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "component,statistic,pvalue,samples");
        assert!(lines[1].starts_with("real-part,"));
        assert!(lines[3].starts_with("modulus-squared,"));
        assert!(lines[3].ends_with(",500"));
    }
}
