//! Expected measure under component imperfections and phase noise.
//!
//! Each draw samples a full parameter set for the filter, propagates the
//! three event histories to the detector one at a time, and evaluates
//! `|A(00)|² + |A(01) + e^{iφ}A(11)|²` with `φ` drawn from the measured phase
//! distribution. The glass plate is assumed tuned for maximum output, so the
//! relative phase of `A(01)` and `A(11)` is zero before `φ` is applied.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::{substream, Domain};
use super::measure::LOSS_FACTOR;
use super::stats::MeasureDistribution;
use super::{AnalysisError, Result};
use crate::optics::{
    build_dsi_filter, DsiParams, MirrorSpec, PbsSpec, SplitterSpec, PATH_A, PATH_C, PATH_L, PATH_U,
    PORT_PM,
};

/// Redraws allowed per draw before an unphysical noise model is reported.
pub const MAX_RETRIES: usize = 100;

/// A scalar parameter distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Dist {
    Fixed { value: f64 },
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
}

impl Dist {
    pub fn fixed(value: f64) -> Self {
        Dist::Fixed { value }
    }

    pub fn normal(mean: f64, std: f64) -> Self {
        Dist::Normal { mean, std }
    }

    pub fn center(&self) -> f64 {
        match *self {
            Dist::Fixed { value } => value,
            Dist::Normal { mean, .. } => mean,
            Dist::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Dist::Fixed { value } => value.is_finite(),
            Dist::Normal { mean, std } => mean.is_finite() && std.is_finite() && std >= 0.0,
            Dist::Uniform { low, high } => low.is_finite() && high.is_finite() && low <= high,
        };
        if ok {
            Ok(())
        } else {
            Err(AnalysisError::Input(format!(
                "{name}: invalid distribution {self:?}"
            )))
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::Fixed { value } => value,
            Dist::Normal { mean, std } => {
                if std == 0.0 {
                    mean
                } else {
                    Normal::new(mean, std).expect("validated").sample(rng)
                }
            }
            Dist::Uniform { low, high } => low + (high - low) * rng.gen::<f64>(),
        }
    }
}

/// Uncertainty in the filter's component parameters.
///
/// Splitter entries are transmitted power fractions `T/(T+R)`;
/// `hwp_misalignment` is added independently to each wave plate's nominal
/// angle; `pbs_extinction` is drawn independently for each leakage channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub eta_s: Dist,
    /// Transmittance used to correct the result; defaults to the centre of `eta_s`.
    pub eta_s_nominal: Option<f64>,
    pub bs1_transmission: Dist,
    pub bs1_phi: Dist,
    pub bs2_transmission: Dist,
    pub hwp_misalignment: Dist,
    pub mirror_r_s: Dist,
    pub mirror_r_p: Dist,
    pub mirror_phase_s: Dist,
    pub mirror_phase_p: Dist,
    pub pbs_extinction: Dist,
    pub gt_extinction: Dist,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    /// Zero-width distributions around ideal components.
    pub fn ideal() -> Self {
        NoiseModel {
            eta_s: Dist::fixed(1.0),
            eta_s_nominal: None,
            bs1_transmission: Dist::fixed(0.5),
            bs1_phi: Dist::fixed(FRAC_PI_2),
            bs2_transmission: Dist::fixed(0.5),
            hwp_misalignment: Dist::fixed(0.0),
            mirror_r_s: Dist::fixed(1.0),
            mirror_r_p: Dist::fixed(1.0),
            mirror_phase_s: Dist::fixed(0.0),
            mirror_phase_p: Dist::fixed(0.0),
            pbs_extinction: Dist::fixed(0.0),
            gt_extinction: Dist::fixed(0.0),
        }
    }

    /// Typical bench components: the measured 49.21 : 44.34 splitter
    /// (η_s = 0.9356), ±2% splitting tolerance on `BS₂`, 0.5° wave-plate
    /// alignment error, mirrors with `R_s ≈ 99%`, `R_p ≈ 97%` and a small
    /// s/p phase difference, and polarizer extinction around 10⁻³.
    pub fn bench() -> Self {
        let eta = 0.9356;
        NoiseModel {
            eta_s: Dist::normal(eta, 0.001),
            eta_s_nominal: Some(eta),
            bs1_transmission: Dist::normal(0.4921 / 0.9355, 0.003),
            bs1_phi: Dist::fixed(FRAC_PI_2),
            bs2_transmission: Dist::normal(0.5, 0.02),
            hwp_misalignment: Dist::normal(0.0, 0.5f64.to_radians()),
            mirror_r_s: Dist::normal(0.99, 0.003),
            mirror_r_p: Dist::normal(0.97, 0.005),
            mirror_phase_s: Dist::fixed(0.0),
            mirror_phase_p: Dist::normal(0.0, 0.03),
            pbs_extinction: Dist::Uniform {
                low: 0.0,
                high: 2e-3,
            },
            gt_extinction: Dist::fixed(1e-5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in self.fields() {
            d.validate(name)?;
        }
        if let Some(eta) = self.eta_s_nominal {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(AnalysisError::Input(format!(
                    "eta_s_nominal = {eta} must lie in (0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn fields(&self) -> [(&'static str, &Dist); 11] {
        [
            ("eta_s", &self.eta_s),
            ("bs1_transmission", &self.bs1_transmission),
            ("bs1_phi", &self.bs1_phi),
            ("bs2_transmission", &self.bs2_transmission),
            ("hwp_misalignment", &self.hwp_misalignment),
            ("mirror_r_s", &self.mirror_r_s),
            ("mirror_r_p", &self.mirror_r_p),
            ("mirror_phase_s", &self.mirror_phase_s),
            ("mirror_phase_p", &self.mirror_phase_p),
            ("pbs_extinction", &self.pbs_extinction),
            ("gt_extinction", &self.gt_extinction),
        ]
    }

    pub fn nominal_eta(&self) -> f64 {
        self.eta_s_nominal.unwrap_or_else(|| self.eta_s.center())
    }

    /// One parameter draw, or `None` if any value left its physical range.
    pub fn sample_params<R: Rng>(&self, rng: &mut R) -> Option<DsiParams> {
        let unit = |v: f64| (0.0..=1.0).contains(&v).then_some(v);
        let eta = self.eta_s.sample(rng);
        if !(eta > 0.0 && eta <= 1.0) {
            return None;
        }
        let bs1_t = unit(self.bs1_transmission.sample(rng))?;
        let bs1_phi = self.bs1_phi.sample(rng);
        let bs2_t = unit(self.bs2_transmission.sample(rng))?;
        let mut hwp = || FRAC_PI_4 + self.hwp_misalignment.sample(rng);
        let (hwp1, hwp3) = (hwp(), hwp());
        let hwp2 = FRAC_PI_8 + self.hwp_misalignment.sample(rng);
        let mirror = MirrorSpec {
            r_s: unit(self.mirror_r_s.sample(rng))?,
            r_p: unit(self.mirror_r_p.sample(rng))?,
            phase_s: self.mirror_phase_s.sample(rng),
            phase_p: self.mirror_phase_p.sample(rng),
        };
        let mut pbs = || -> Option<PbsSpec> {
            Some(PbsSpec {
                extinction_t: unit(self.pbs_extinction.sample(rng))?,
                extinction_r: unit(self.pbs_extinction.sample(rng))?,
            })
        };
        let (pbs1, pbs2) = (pbs()?, pbs()?);
        let gt_extinction = unit(self.gt_extinction.sample(rng))?;
        Some(DsiParams {
            bs1: SplitterSpec::with_ratio(bs1_t, bs1_phi, eta),
            phase_g: 0.0,
            hwp1_theta: hwp1,
            hwp2_theta: hwp2,
            hwp3_theta: hwp3,
            pbs1,
            pbs2,
            bs2: SplitterSpec::with_ratio(bs2_t, FRAC_PI_2, 1.0),
            mirror,
            gt_extinction,
        })
    }
}

/// Jones vectors reaching the detector from histories `00`, `01` and `11`
/// individually (the other internal paths blocked).
pub fn event_amplitudes(params: &DsiParams) -> Result<[[Complex64; 2]; 3]> {
    let circuit = build_dsi_filter(params)?;
    let at_pm = |blocked: &[&str]| -> Result<[Complex64; 2]> {
        let out = circuit.propagate(blocked)?;
        Ok(out.jones(PORT_PM).unwrap_or_default())
    };
    Ok([
        at_pm(&[PATH_L, PATH_C])?,
        at_pm(&[PATH_U, PATH_C])?,
        at_pm(&[PATH_U, PATH_A])?,
    ])
}

/// `|A(00)|² + |A(01) + e^{iφ}A(11)|²` after aligning `A(01)` with `A(11)`,
/// scaled by `2/η²` so that ideal components give 5/4.
pub fn measure_at_phase(amps: &[[Complex64; 2]; 3], phase: f64, eta_nominal: f64) -> f64 {
    let power = |a: &[Complex64; 2]| a[0].norm_sqr() + a[1].norm_sqr();
    let overlap = amps[1][0].conj() * amps[2][0] + amps[1][1].conj() * amps[2][1];
    let raw =
        power(&amps[0]) + power(&amps[1]) + power(&amps[2]) + 2.0 * overlap.norm() * phase.cos();
    LOSS_FACTOR / (eta_nominal * eta_nominal) * raw
}

/// Distribution of the expected measure over `n_draws` parameter and phase
/// draws. An empty `phase` slice means `φ ≡ 0`.
pub fn theoretical_measure(
    noise: &NoiseModel,
    phase: &[f64],
    n_draws: usize,
    seed: u64,
) -> Result<MeasureDistribution> {
    if n_draws == 0 {
        return Err(AnalysisError::Input("n_draws must be at least 1".into()));
    }
    noise.validate()?;
    let eta_nominal = noise.nominal_eta();
    let samples = (0..n_draws as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, Domain::Theory, k);
            let params = (0..MAX_RETRIES)
                .find_map(|_| noise.sample_params(&mut rng))
                .ok_or_else(|| {
                    AnalysisError::Unphysical(format!(
                        "no physical parameter set after {MAX_RETRIES} draws"
                    ))
                })?;
            let phi = if phase.is_empty() {
                0.0
            } else {
                phase[rng.gen_range(0..phase.len())]
            };
            Ok(measure_at_phase(
                &event_amplitudes(&params)?,
                phi,
                eta_nominal,
            ))
        })
        .collect::<Result<Vec<f64>>>()?;
    MeasureDistribution::from_samples(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_components_give_five_quarters() {
        let d = theoretical_measure(&NoiseModel::ideal(), &[], 50, 0).unwrap();
        assert!(d.samples().iter().all(|&m| (m - 1.25).abs() < 1e-12));
        let d = theoretical_measure(&NoiseModel::ideal(), &[0.0; 4], 10, 0).unwrap();
        assert!((d.median() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn lossy_splitter_is_folded_out() {
        let noise = NoiseModel {
            eta_s: Dist::fixed(0.9356),
            ..NoiseModel::ideal()
        };
        let d = theoretical_measure(&noise, &[], 5, 1).unwrap();
        assert!((d.median() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn phase_spread_lowers_the_median() {
        let noise = NoiseModel::bench();
        let at_zero = theoretical_measure(&noise, &[], 2000, 3).unwrap();
        let phases: Vec<f64> = (0..200).map(|k| 0.4 * k as f64 / 200.0).collect();
        let spread = theoretical_measure(&noise, &phases, 2000, 3).unwrap();
        assert!(spread.median() < at_zero.median());
    }

    #[test]
    fn unphysical_model_errors_after_retries() {
        let noise = NoiseModel {
            mirror_r_s: Dist::fixed(1.5),
            ..NoiseModel::ideal()
        };
        assert!(matches!(
            theoretical_measure(&noise, &[], 3, 0),
            Err(AnalysisError::Unphysical(_))
        ));
        assert!(theoretical_measure(&NoiseModel::ideal(), &[], 0, 0).is_err());
    }

    #[test]
    fn noise_model_json() {
        let json = r#"{"eta_s":{"type":"normal","mean":0.93,"std":0.01},
                       "pbs_extinction":{"type":"uniform","low":0.0,"high":0.001}}"#;
        let n: NoiseModel = serde_json::from_str(json).unwrap();
        assert_eq!(n.eta_s, Dist::normal(0.93, 0.01));
        assert_eq!(n.mirror_r_s, Dist::fixed(1.0));
        assert!(serde_json::from_str::<NoiseModel>(r#"{"bogus":1}"#).is_err());
    }
}
