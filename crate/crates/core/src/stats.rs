//! Small statistical helpers for the sampler checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Gamma, Normal};

/// Asymptotic one-sample Kolmogorov–Smirnov coefficient at level 0.01.
pub const KS_COEFF_001: f64 = 1.6276;
/// Two-sided normal quantile at level 0.01.
pub const Z_001: f64 = 2.5758;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub critical_value: f64,
    pub pass: bool,
}

/// `sup |F_n(x) − F(x)|` over the sample.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

pub fn ks_critical_value_001(n: usize) -> f64 {
    KS_COEFF_001 / (n as f64).sqrt()
}

pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let statistic = ks_statistic(samples, cdf);
    let critical_value = ks_critical_value_001(samples.len());
    KsResult { n: samples.len(), statistic, critical_value, pass: statistic < critical_value }
}

pub fn gamma_cdf(shape: f64) -> impl Fn(f64) -> f64 {
    let d = Gamma::new(shape, 1.0).expect("positive shape");
    move |x| d.cdf(x)
}

pub fn beta_cdf(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    let d = Beta::new(a, b).expect("positive parameters");
    move |x| d.cdf(x)
}

pub fn normal_cdf(mean: f64, sd: f64) -> impl Fn(f64) -> f64 {
    let d = Normal::new(mean, sd).expect("positive sd");
    move |x| d.cdf(x)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Test of zero correlation at level 0.01, using `√n · r ≈ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub n: usize,
    pub r: f64,
    pub critical_value: f64,
    pub pass: bool,
}

pub fn correlation_test(xs: &[f64], ys: &[f64]) -> CorrelationResult {
    let r = pearson(xs, ys);
    let critical_value = Z_001 / (xs.len() as f64).sqrt();
    CorrelationResult { n: xs.len(), r, critical_value, pass: r.abs() < critical_value }
}
