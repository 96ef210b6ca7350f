use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_probability, BootstrapConfig};
use super::measure::{
    corrected_probability, intensity_measure, measure_from_probability, transmittance,
};
use super::phase::phase_distribution;
use super::stats::{significance, MeasureDistribution, SigmaConvention, Summary};
use super::theory::{theoretical_measure, NoiseModel};
use super::trace::{TraceLabel, TraceSet};
use super::{AnalysisError, Result};

/// Largest value a classical probability can take.
pub const CLASSICAL_BOUND: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub bootstrap: BootstrapConfig,
    pub noise: NoiseModel,
    pub theory_draws: usize,
    pub sigma_convention: SigmaConvention,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            bootstrap: BootstrapConfig::default(),
            noise: NoiseModel::ideal(),
            theory_draws: 10_000,
            sigma_convention: SigmaConvention::SampleStd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    /// `None` when the spread is zero.
    pub vs_classical_bound: Option<f64>,
    pub vs_theory: Option<f64>,
    pub convention: SigmaConvention,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub median: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub n_samples: usize,
}

impl From<Summary> for BandSummary {
    fn from(s: Summary) -> Self {
        BandSummary {
            median: s.median,
            sigma_plus: s.sigma_plus,
            sigma_minus: s.sigma_minus,
            n_samples: s.n_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub median: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub std_dev: f64,
    pub n_samples: usize,
    /// Fraction of phase draws discarded by the interference criterion.
    pub rejection_fraction: f64,
    pub significance: Significance,
    pub eta_s: f64,
    /// Zero-phase measure from whole-record single-history powers.
    pub intensity_measure: f64,
    pub phase: BandSummary,
    pub theory: BandSummary,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: AnalysisReport,
    pub measure: MeasureDistribution,
    pub theory: MeasureDistribution,
}

fn guarded(res: Result<f64>) -> Result<Option<f64>> {
    match res {
        Ok(v) => Ok(Some(v)),
        Err(AnalysisError::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// transmittance → bootstrap → correction → measure → phase → theory band →
/// significance.
pub fn run_pipeline(traces: &TraceSet, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let get = |label| traces.get(label);
    let p_i = get(TraceLabel::Input)?;
    let eta_s = transmittance(
        p_i.mean(),
        get(TraceLabel::Transmitted)?.mean(),
        get(TraceLabel::Reflected)?.mean(),
    )?;
    if eta_s > 1.0 {
        return Err(AnalysisError::Input(format!(
            "measured transmittance {eta_s} exceeds 1"
        )));
    }

    let ratios = bootstrap_probability(get(TraceLabel::Event)?, p_i, &cfg.bootstrap)?;
    let measure = measure_from_probability(&corrected_probability(&ratios, eta_s)?)?;

    let phase = phase_distribution(
        get(TraceLabel::Interference)?,
        get(TraceLabel::H01)?,
        get(TraceLabel::H11)?,
        &cfg.bootstrap,
    )?;
    let phase_dist = MeasureDistribution::from_samples(phase.samples.clone())?;
    let theory = theoretical_measure(
        &cfg.noise,
        &phase.samples,
        cfg.theory_draws,
        cfg.bootstrap.rng_seed,
    )?;

    let intensity = intensity_measure(
        get(TraceLabel::H00)?.mean(),
        get(TraceLabel::H01)?.mean(),
        get(TraceLabel::H11)?.mean(),
        p_i.mean(),
        eta_s,
    )?;

    let summary = measure.summary();
    let vs_classical_bound = guarded(significance(
        &summary,
        CLASSICAL_BOUND,
        cfg.sigma_convention,
    ))?;
    let vs_theory = guarded(significance(
        &summary,
        theory.median(),
        cfg.sigma_convention,
    ))?;
    let report = AnalysisReport {
        median: summary.median,
        sigma_plus: summary.sigma_plus,
        sigma_minus: summary.sigma_minus,
        std_dev: summary.std_dev,
        n_samples: summary.n_samples,
        rejection_fraction: phase.rejection_fraction(),
        significance: Significance {
            vs_classical_bound,
            vs_theory,
            convention: cfg.sigma_convention,
            degenerate: vs_classical_bound.is_none(),
        },
        eta_s,
        intensity_measure: intensity,
        phase: phase_dist.summary().into(),
        theory: theory.summary().into(),
    };
    Ok(PipelineOutput {
        report,
        measure,
        theory,
    })
}
