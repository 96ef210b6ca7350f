use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};

/// Upper percentile of the ±1σ band of a normal distribution.
pub const UPPER_PERCENTILE: f64 = 84.13;
/// Lower percentile of the ±1σ band of a normal distribution.
pub const LOWER_PERCENTILE: f64 = 15.87;

/// Linearly interpolated percentile of sorted data, `q` in [0, 100].
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    assert!((0.0..=100.0).contains(&q), "percentile {q} out of range");
    let rank = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
    }
}

fn sample_std(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Median with asymmetric spread, without the samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub std_dev: f64,
    pub n_samples: usize,
}

/// Samples plus median and 84.13/15.87 percentile spread around it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDistribution {
    samples: Vec<f64>,
    summary: Summary,
}

impl MeasureDistribution {
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(AnalysisError::Degenerate(
                "distribution has no samples".into(),
            ));
        }
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(AnalysisError::Input(format!("non-finite sample {bad}")));
        }
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let median = percentile_sorted(&sorted, 50.0);
        let upper = percentile_sorted(&sorted, UPPER_PERCENTILE);
        let lower = percentile_sorted(&sorted, LOWER_PERCENTILE);
        let summary = Summary {
            median,
            sigma_plus: (upper - median).max(0.0),
            sigma_minus: (median - lower).max(0.0),
            std_dev: sample_std(&samples),
            n_samples: samples.len(),
        };
        Ok(MeasureDistribution { samples, summary })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn summary(&self) -> Summary {
        self.summary
    }

    pub fn median(&self) -> f64 {
        self.summary.median
    }

    pub fn sigma_plus(&self) -> f64 {
        self.summary.sigma_plus
    }

    pub fn sigma_minus(&self) -> f64 {
        self.summary.sigma_minus
    }

    pub fn std_dev(&self) -> f64 {
        self.summary.std_dev
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Whether `value` lies within `[median − σ₋, median + σ₊]`.
    pub fn band_contains(&self, value: f64) -> bool {
        let s = self.summary;
        value >= s.median - s.sigma_minus && value <= s.median + s.sigma_plus
    }
}

/// Which spread to divide by when expressing a distance in standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaConvention {
    #[default]
    SampleStd,
    SigmaPlus,
    SigmaMinus,
    /// σ₊ when the reference lies above the median, σ₋ otherwise.
    SideMatched,
}

impl SigmaConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            SigmaConvention::SampleStd => "sample-std",
            SigmaConvention::SigmaPlus => "sigma-plus",
            SigmaConvention::SigmaMinus => "sigma-minus",
            SigmaConvention::SideMatched => "side-matched",
        }
    }
}

impl fmt::Display for SigmaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SigmaConvention {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self> {
        [
            SigmaConvention::SampleStd,
            SigmaConvention::SigmaPlus,
            SigmaConvention::SigmaMinus,
            SigmaConvention::SideMatched,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| AnalysisError::Input(format!("unknown sigma convention {s:?}")))
    }
}

/// `|median − reference| / σ` with σ chosen by `convention`.
const SPREAD_FLOOR: f64 = 1e-12;

pub fn significance(summary: &Summary, reference: f64, convention: SigmaConvention) -> Result<f64> {
    let sigma = match convention {
        SigmaConvention::SampleStd => summary.std_dev,
        SigmaConvention::SigmaPlus => summary.sigma_plus,
        SigmaConvention::SigmaMinus => summary.sigma_minus,
        SigmaConvention::SideMatched => {
            if reference > summary.median {
                summary.sigma_plus
            } else {
                summary.sigma_minus
            }
        }
    };
    // Spreads at rounding level come from prefix-sum arithmetic on constant data.
    if !(sigma > SPREAD_FLOOR * summary.median.abs()) || sigma == 0.0 {
        return Err(AnalysisError::Degenerate(format!(
            "zero spread under the {convention} convention"
        )));
    }
    Ok((summary.median - reference).abs() / sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
}

/// Equal-width histogram. The last bin is closed on the right.
pub fn histogram(samples: &[f64], n_bins: usize) -> Vec<Bin> {
    if samples.is_empty() || n_bins == 0 {
        return Vec::new();
    }
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![Bin {
            bin_left: min,
            bin_right: max,
            count: samples.len(),
        }];
    }
    let width = (max - min) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        let k = (((x - min) / width) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| Bin {
            bin_left: min + k as f64 * width,
            bin_right: if k + 1 == n_bins {
                max
            } else {
                min + (k + 1) as f64 * width
            },
            count,
        })
        .collect()
}

/// Bin count from the Freedman–Diaconis rule, `h = 2·IQR·n^{-1/3}`.
pub fn freedman_diaconis_bins(samples: &[f64]) -> usize {
    const MAX_BINS: usize = 10_000;
    if samples.len() < 2 {
        return 1;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = percentile_sorted(&sorted, 75.0) - percentile_sorted(&sorted, 25.0);
    let range = sorted[sorted.len() - 1] - sorted[0];
    let width = 2.0 * iqr / (samples.len() as f64).cbrt();
    if !(width > 0.0) || !(range > 0.0) {
        return 1;
    }
    ((range / width).ceil() as usize).clamp(1, MAX_BINS)
}
