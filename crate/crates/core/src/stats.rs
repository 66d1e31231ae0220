//! Empirical distribution tools: ECDFs, the two-sample Kolmogorov-Smirnov
//! test with asymptotic p-values, and Monte Carlo error bands.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample contains NaN at index {0}")]
    NaN(usize),
    #[error("empty sample")]
    Empty,
}

/// A finite, NaN-free sample, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    sorted: Vec<f64>,
    pub label: String,
    pub seed: Option<u64>,
}

impl SampleSet {
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatsError> {
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(StatsError::NaN(i));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: values, label: String::new(), seed: None })
    }

    pub fn labeled(mut self, label: impl Into<String>, seed: Option<u64>) -> Self {
        self.label = label.into();
        self.seed = seed;
        self
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Lower median.
    pub fn median(&self) -> Result<f64, StatsError> {
        if self.is_empty() {
            return Err(StatsError::Empty);
        }
        Ok(self.sorted[(self.sorted.len() - 1) / 2])
    }
}

/// Outcome of a two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub m: usize,
}

/// Right-continuous empirical CDF at `x`.
pub fn ecdf_eval(s: &SampleSet, x: f64) -> Result<f64, StatsError> {
    if s.is_empty() {
        return Err(StatsError::Empty);
    }
    let k = s.sorted.partition_point(|&v| v <= x);
    Ok(k as f64 / s.len() as f64)
}

/// `D = sup_x |F_n(x) - G_m(x)|` by a merged sweep over both sorted samples.
///
/// All copies of a tied value are consumed from both samples before the gap
/// is read, so ties never produce a spurious jump.
pub fn ks_statistic(a: &SampleSet, b: &SampleSet) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::Empty);
    }
    let (xs, ys) = (&a.sorted, &b.sorted);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    // Once one sample is exhausted the gap only shrinks toward 0.
    Ok(d)
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // P(K <= λ) = √(2π)/λ Σ exp(-(2k-1)² π² / (8λ²)), fast for small λ.
        let f = -PI * PI / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                libm::exp(odd * odd * f)
            })
            .sum::<f64>()
            * libm::sqrt(2.0 * PI)
            / lambda;
        1.0 - cdf
    } else {
        2.0 * (1..=100)
            .map(|k| {
                let k = k as f64;
                let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * libm::exp(-2.0 * k * k * lambda * lambda)
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}

/// Two-sample KS test with the asymptotic p-value at effective size
/// `nm / (n + m)`.
pub fn ks_two_sample(a: &SampleSet, b: &SampleSet) -> Result<KsReport, StatsError> {
    let statistic = ks_statistic(a, b)?;
    let (n, m) = (a.len(), b.len());
    let effective = (n as f64 * m as f64) / (n + m) as f64;
    let p_value = kolmogorov_survival(libm::sqrt(effective) * statistic);
    Ok(KsReport { statistic, p_value, n, m })
}

/// `mean ± k·sqrt(var / n)`.
pub fn mc_band(mean: f64, var: f64, n: usize, k: f64) -> Result<(f64, f64), StatsError> {
    if n == 0 {
        return Err(StatsError::Empty);
    }
    let half = k * libm::sqrt(var / n as f64);
    Ok((mean - half, mean + half))
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance(values: &[f64]) -> Result<(f64, f64), StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = if values.len() > 1 { m2 / (values.len() - 1) as f64 } else { 0.0 };
    Ok((mean, var))
}
