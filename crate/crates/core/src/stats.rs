//! Interval estimates and goodness-of-fit tests for the soundness and
//! zero-knowledge experiments.

use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion with `successes` out of `trials`.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).expect("positive shape").inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// `p ± sigmas * sqrt(p(1-p)/trials)`, clamped to `[0, 1]`.
pub fn sigma_interval(p: f64, trials: u64, sigmas: f64) -> (f64, f64) {
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    ((p - sigmas * sd).max(0.0), (p + sigmas * sd).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

fn upper_tail(statistic: f64, dof: f64) -> f64 {
    if dof <= 0.0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof).expect("positive dof").cdf(statistic)
}

/// Pearson goodness-of-fit of `observed` counts against `expected`
/// probabilities (which must sum to one).
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (observed.len() - 1) as f64;
    ChiSquareResult {
        statistic,
        dof,
        p_value: upper_tail(statistic, dof),
    }
}

/// Two-sample chi-square homogeneity test over categorical samples.
pub fn two_sample_chi_square<K: Eq + Hash>(
    a: impl IntoIterator<Item = K>,
    b: impl IntoIterator<Item = K>,
) -> ChiSquareResult {
    let mut counts: HashMap<K, (u64, u64)> = HashMap::new();
    for k in a {
        counts.entry(k).or_default().0 += 1;
    }
    for k in b {
        counts.entry(k).or_default().1 += 1;
    }
    let (ra, rb) = counts
        .values()
        .fold((0u64, 0u64), |(x, y), &(p, q)| (x + p, y + q));
    let (ra, rb) = (ra as f64, rb as f64);
    let (ka, kb) = ((rb / ra).sqrt(), (ra / rb).sqrt());
    let statistic = counts
        .values()
        .map(|&(p, q)| (ka * p as f64 - kb * q as f64).powi(2) / (p + q) as f64)
        .sum();
    let dof = counts.len().saturating_sub(1) as f64;
    ChiSquareResult {
        statistic,
        dof,
        p_value: upper_tail(statistic, dof),
    }
}

/// Wald-Wolfowitz runs test; returns the z-score of the observed number of
/// runs. `None` when the sequence is constant.
pub fn runs_test_z(seq: &[bool]) -> Option<f64> {
    let n1 = seq.iter().filter(|&&x| x).count() as f64;
    let n2 = seq.len() as f64 - n1;
    if n1 == 0.0 || n2 == 0.0 {
        return None;
    }
    let runs = 1 + seq.windows(2).filter(|w| w[0] != w[1]).count();
    let n = n1 + n2;
    let mean = 2.0 * n1 * n2 / n + 1.0;
    let var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
    Some((runs as f64 - mean) / var.sqrt())
}
