//! Synthetic power traces with a known underlying measure.
//!
//! The single-history intensities are taken equal, `I(00) = I(01) = I(11) = c`,
//! and `c` is chosen so that the expected event power reproduces `mu_star`
//! once the phase jitter is averaged:
//! `μ* = 3c + 2c·E[cos φ]`, with `E[cos φ] = cos(offset)·exp(−jitter²/2)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::bootstrap::{substream, Domain};
use super::measure::LOSS_FACTOR;
use super::trace::{PowerTrace, TraceLabel, TraceSet};
use super::{AnalysisError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub mu_star: f64,
    pub eta_s: f64,
    /// Share of the surviving light that `BS₁` transmits, `T/(T+R)`.
    pub transmitted_fraction: f64,
    pub input_power_w: f64,
    pub duration_s: f64,
    pub rate_hz: f64,
    /// Relative standard deviation of independent per-sample noise.
    pub noise_rel: f64,
    /// Peak-to-peak linear drift, relative, across the record (mean preserving).
    pub drift_rel: f64,
    pub phase_offset: f64,
    pub phase_jitter: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            mu_star: 1.18,
            eta_s: 0.9356,
            transmitted_fraction: 0.4921 / 0.9355,
            input_power_w: 1e-3,
            duration_s: 2000.0,
            rate_hz: 10.0,
            noise_rel: 0.01,
            drift_rel: 0.02,
            phase_offset: 0.5,
            phase_jitter: 0.05,
        }
    }
}

impl Scenario {
    /// Noise-free, drift-free traces for `mu_star` at exactly constructive phase.
    pub fn noiseless(mu_star: f64) -> Self {
        Scenario {
            mu_star,
            noise_rel: 0.0,
            drift_rel: 0.0,
            phase_offset: 0.0,
            phase_jitter: 0.0,
            ..Scenario::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("mu_star", self.mu_star),
            ("eta_s", self.eta_s),
            ("input_power_w", self.input_power_w),
            ("duration_s", self.duration_s),
            ("rate_hz", self.rate_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AnalysisError::Input(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        if self.eta_s > 1.0 {
            return Err(AnalysisError::Input("eta_s must not exceed 1".into()));
        }
        if !(0.0..=1.0).contains(&self.transmitted_fraction) {
            return Err(AnalysisError::Input(
                "transmitted_fraction must lie in [0, 1]".into(),
            ));
        }
        if !(self.noise_rel >= 0.0 && self.drift_rel >= 0.0 && self.phase_jitter >= 0.0) {
            return Err(AnalysisError::Input(
                "noise, drift and jitter must be non-negative".into(),
            ));
        }
        if self.n_samples() < 2 {
            return Err(AnalysisError::Input(
                "duration × rate gives fewer than 2 samples".into(),
            ));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        (self.duration_s * self.rate_hz).floor() as usize
    }

    /// Single-history intensity `c` (in measure units).
    pub fn history_intensity(&self) -> f64 {
        let mean_cos = self.phase_offset.cos() * (-0.5 * self.phase_jitter.powi(2)).exp();
        self.mu_star / (3.0 + 2.0 * mean_cos)
    }
}

type Level<'a> = Box<dyn Fn(usize) -> f64 + 'a>;

/// Generates all eight labeled traces. Deterministic for a given seed.
pub fn synthesize_traces(scenario: &Scenario, seed: u64) -> Result<TraceSet> {
    scenario.validate()?;
    let n = scenario.n_samples();
    let times: Vec<f64> = (0..n).map(|k| k as f64 / scenario.rate_hz).collect();
    let p_in = scenario.input_power_w;
    // Detected power per unit measure.
    let to_power = scenario.eta_s.powi(2) / LOSS_FACTOR * p_in;
    let c = scenario.history_intensity();
    let eta = scenario.eta_s;
    let tf = scenario.transmitted_fraction;

    let mut phase_rng = substream(seed, Domain::Synth, 0);
    let phases: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = phase_rng.sample(StandardNormal);
            scenario.phase_offset + scenario.phase_jitter * z
        })
        .collect();

    let profiles: [(TraceLabel, Level); 8] = [
        (TraceLabel::Input, Box::new(|_| p_in)),
        (
            TraceLabel::Event,
            Box::new(|k| to_power * c * (3.0 + 2.0 * phases[k].cos())),
        ),
        (
            TraceLabel::Interference,
            Box::new(|k| to_power * c * (2.0 + 2.0 * phases[k].cos())),
        ),
        (TraceLabel::H00, Box::new(|_| to_power * c)),
        (TraceLabel::H01, Box::new(|_| to_power * c)),
        (TraceLabel::H11, Box::new(|_| to_power * c)),
        (TraceLabel::Transmitted, Box::new(|_| eta * tf * p_in)),
        (TraceLabel::Reflected, Box::new(|_| eta * (1.0 - tf) * p_in)),
    ];

    let mut set = TraceSet::new();
    for (stream, (label, level)) in profiles.iter().enumerate() {
        let mut rng = substream(seed, Domain::Synth, 1 + stream as u64);
        let powers = (0..n)
            .map(|k| {
                let drift = 1.0 + scenario.drift_rel * (times[k] / scenario.duration_s - 0.5);
                let z: f64 = if scenario.noise_rel > 0.0 {
                    rng.sample(StandardNormal)
                } else {
                    0.0
                };
                (level(k) * drift * (1.0 + scenario.noise_rel * z)).max(0.0)
            })
            .collect();
        set.insert(PowerTrace::new(*label, times.clone(), powers)?);
    }
    Ok(set)
}
