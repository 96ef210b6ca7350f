use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use super::bootstrap::{random_window_mean, substream, BootstrapConfig, Domain};
use super::trace::PowerTrace;
use super::{AnalysisError, Result};

/// Largest rejection fraction tolerated before the phase data is declared unusable.
pub const MAX_REJECTION_FRACTION: f64 = 0.5;

// Cosine values this close to 0 or ±1 snap to the exact angle; the input
// intensities cannot resolve anything finer.
const SNAP: f64 = 64.0 * f64::EPSILON;

/// Inverts `I(φ) = I₁ + I₂ + 2√(I₁I₂)·cos φ` for `φ ∈ [0, π]`.
///
/// Returns `Ok(None)` when `|I(φ) − I₁ − I₂| > 2√(I₁I₂)`, i.e. the sample is
/// inconsistent with two-beam interference and must be discarded.
pub fn extract_phase(i_phi: f64, i_1: f64, i_2: f64) -> Result<Option<f64>> {
    if !(i_1 > 0.0 && i_2 > 0.0) || !i_1.is_finite() || !i_2.is_finite() {
        return Err(AnalysisError::Input(format!(
            "single-beam intensities must be positive, got I₁ = {i_1}, I₂ = {i_2}"
        )));
    }
    if !(i_phi >= 0.0) || !i_phi.is_finite() {
        return Err(AnalysisError::Input(format!(
            "interference intensity must be non-negative, got {i_phi}"
        )));
    }
    let amplitude = 2.0 * (i_1 * i_2).sqrt();
    let cos_phi = ((i_phi - i_1) - i_2) / amplitude;
    if cos_phi.abs() > 1.0 + SNAP {
        return Ok(None);
    }
    let phase = if cos_phi >= 1.0 - SNAP {
        0.0
    } else if cos_phi <= -1.0 + SNAP {
        PI
    } else if cos_phi.abs() <= SNAP {
        FRAC_PI_2
    } else {
        cos_phi.acos()
    };
    Ok(Some(phase))
}

/// Valid phase samples plus how many draws were discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    pub samples: Vec<f64>,
    pub n_rejected: usize,
}

impl PhaseDistribution {
    pub fn n_draws(&self) -> usize {
        self.samples.len() + self.n_rejected
    }

    pub fn rejection_fraction(&self) -> f64 {
        self.n_rejected as f64 / self.n_draws() as f64
    }
}

/// Draws windowed means of `P_int`, `P_01`, `P_11` and converts each triple
/// to a phase.
pub fn phase_distribution(
    p_int: &PowerTrace,
    p_01: &PowerTrace,
    p_11: &PowerTrace,
    cfg: &BootstrapConfig,
) -> Result<PhaseDistribution> {
    cfg.check(&[p_int, p_01, p_11])?;
    let draws: Vec<Option<f64>> = (0..cfg.n_resamples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(cfg.rng_seed, Domain::Phase, k);
            let i_phi = random_window_mean(p_int, cfg.window_seconds, &mut rng)?;
            let i_1 = random_window_mean(p_01, cfg.window_seconds, &mut rng)?;
            let i_2 = random_window_mean(p_11, cfg.window_seconds, &mut rng)?;
            extract_phase(i_phi, i_1, i_2)
        })
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = draws.iter().flatten().copied().collect();
    let dist = PhaseDistribution {
        n_rejected: draws.len() - samples.len(),
        samples,
    };
    if dist.samples.is_empty() {
        return Err(AnalysisError::Degenerate(
            "every phase sample violates the interference criterion".into(),
        ));
    }
    if dist.rejection_fraction() > MAX_REJECTION_FRACTION {
        return Err(AnalysisError::DataQuality {
            rejection_fraction: dist.rejection_fraction(),
        });
    }
    Ok(dist)
}
