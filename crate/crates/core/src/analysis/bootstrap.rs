use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trace::PowerTrace;
use super::{AnalysisError, Result};

/// Stream domains, so different stochastic stages never share a substream.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub(crate) enum Domain {
    Ratio = 1,
    Phase = 2,
    Theory = 3,
    Synth = 4,
}

/// Independent generator for draw `index` of a stage. Results do not depend
/// on the order in which draws are evaluated.
pub(crate) fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    #[serde(default = "default_window")]
    pub window_seconds: f64,
    #[serde(default = "default_resamples")]
    pub n_resamples: usize,
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_window() -> f64 {
    100.0
}

fn default_resamples() -> usize {
    100_000
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            window_seconds: default_window(),
            n_resamples: default_resamples(),
            rng_seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn new(window_seconds: f64, n_resamples: usize, rng_seed: u64) -> Self {
        BootstrapConfig {
            window_seconds,
            n_resamples,
            rng_seed,
        }
    }

    pub(crate) fn check(&self, traces: &[&PowerTrace]) -> Result<()> {
        if !(self.window_seconds > 0.0 && self.window_seconds.is_finite()) {
            return Err(AnalysisError::Input(format!(
                "window_seconds = {} must be positive",
                self.window_seconds
            )));
        }
        if self.n_resamples == 0 {
            return Err(AnalysisError::Input("n_resamples must be positive".into()));
        }
        for trace in traces {
            if self.window_seconds >= trace.duration() {
                return Err(AnalysisError::WindowTooLong {
                    label: trace.label(),
                    window: self.window_seconds,
                    duration: trace.duration(),
                });
            }
        }
        Ok(())
    }
}

/// Mean of a contiguous window with a uniformly random start.
pub(crate) fn random_window_mean<R: Rng>(
    trace: &PowerTrace,
    width: f64,
    rng: &mut R,
) -> Result<f64> {
    let span = trace.duration() - width;
    let start = trace.start() + rng.gen::<f64>() * span;
    trace
        .window_mean(start, width)
        .ok_or(AnalysisError::EmptyWindow {
            label: trace.label(),
            start,
            width,
        })
}

/// Ratios `mean(window_E) / mean(window_I)` over independently placed windows.
pub fn bootstrap_probability(
    trace_e: &PowerTrace,
    trace_i: &PowerTrace,
    cfg: &BootstrapConfig,
) -> Result<Vec<f64>> {
    cfg.check(&[trace_e, trace_i])?;
    (0..cfg.n_resamples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(cfg.rng_seed, Domain::Ratio, k);
            let e = random_window_mean(trace_e, cfg.window_seconds, &mut rng)?;
            let i = random_window_mean(trace_i, cfg.window_seconds, &mut rng)?;
            if !(i > 0.0) {
                return Err(AnalysisError::Degenerate(
                    "input window has zero mean power".into(),
                ));
            }
            Ok(e / i)
        })
        .collect()
}
