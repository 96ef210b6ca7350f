use super::stats::MeasureDistribution;
use super::{AnalysisError, Result};

/// Event-filter loss factor: the Hadamard/PBS recombination and the `BS₂`
/// tap each discard half of the event's light.
pub const LOSS_FACTOR: f64 = 2.0;

fn check_eta(eta_s: f64) -> Result<()> {
    if eta_s > 0.0 && eta_s <= 1.0 {
        Ok(())
    } else {
        Err(AnalysisError::Input(format!(
            "eta_s = {eta_s} must lie in (0, 1]"
        )))
    }
}

/// Overall substrate transmittance `(P_T + P_R) / P_I`.
pub fn transmittance(p_i: f64, p_t: f64, p_r: f64) -> Result<f64> {
    if !(p_i > 0.0) {
        return Err(AnalysisError::Input(format!(
            "P_I = {p_i} must be positive"
        )));
    }
    if !(p_t >= 0.0 && p_r >= 0.0) {
        return Err(AnalysisError::Input(
            "P_T and P_R must be non-negative".into(),
        ));
    }
    Ok((p_t + p_r) / p_i)
}

/// Divides by `η_s²`: the photon crosses the lossy splitter twice.
pub fn corrected_probability(p: &[f64], eta_s: f64) -> Result<Vec<f64>> {
    check_eta(eta_s)?;
    let scale = eta_s * eta_s;
    Ok(p.iter().map(|x| x / scale).collect())
}

/// Scales corrected probabilities by [`LOSS_FACTOR`] and summarizes them.
pub fn measure_from_probability(p_corrected: &[f64]) -> Result<MeasureDistribution> {
    MeasureDistribution::from_samples(p_corrected.iter().map(|p| LOSS_FACTOR * p).collect())
}

/// Measure at zero interferometric phase from single-history powers:
/// `I(00) + I(01) + I(11) + 2√(I(01)·I(11))` with `I(γ) = (2/η_s²)(P_γ/P_I)`.
pub fn intensity_measure(p_00: f64, p_01: f64, p_11: f64, p_i: f64, eta_s: f64) -> Result<f64> {
    check_eta(eta_s)?;
    if !(p_i > 0.0) {
        return Err(AnalysisError::Input(format!(
            "P_I = {p_i} must be positive"
        )));
    }
    if [p_00, p_01, p_11].iter().any(|p| !(*p >= 0.0)) {
        return Err(AnalysisError::Input(
            "history powers must be non-negative".into(),
        ));
    }
    let intensity = |p: f64| LOSS_FACTOR / (eta_s * eta_s) * (p / p_i);
    let (i00, i01, i11) = (intensity(p_00), intensity(p_01), intensity(p_11));
    Ok(i00 + i01 + i11 + 2.0 * (i01 * i11).sqrt())
}
