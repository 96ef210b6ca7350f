//! The displaced-Sagnac event filter for `E = {00, 01, 11}`.
//!
//! The photon crosses `BS₁` twice. Between passes, path A (anticlockwise)
//! carries a tilted glass plate and path C (clockwise) a half-wave plate that
//! flips H to V, so the polarization ancilla records the first-pass site.
//! After the second pass, `PBS₁` on the upper output discards history `10`,
//! a Hadamard plate and `PBS₂` on the lower output make `01` and `11`
//! interfere, and `BS₂` halves history `00` before it is recombined at `PM`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use serde::{Deserialize, Serialize};

use super::circuit::OpticalCircuit;
use super::component::{Component, ComponentKind};
use super::{OpticsError, Result};

pub const PATH_A: &str = "A";
pub const PATH_C: &str = "C";
pub const PATH_U: &str = "U";
pub const PATH_L: &str = "L";
pub const PORT_PM: &str = "PM";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterSpec {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
    #[serde(default = "one")]
    pub eta_s: f64,
}

fn one() -> f64 {
    1.0
}

impl SplitterSpec {
    pub fn balanced() -> Self {
        SplitterSpec {
            t: FRAC_1_SQRT_2,
            r: FRAC_1_SQRT_2,
            phi: FRAC_PI_2,
            eta_s: 1.0,
        }
    }

    /// Splitter with transmitted power fraction `t_frac` of the surviving
    /// light, i.e. `T:R = t_frac : 1 − t_frac`.
    pub fn with_ratio(t_frac: f64, phi: f64, eta_s: f64) -> Self {
        SplitterSpec {
            t: t_frac.sqrt(),
            r: (1.0 - t_frac).sqrt(),
            phi,
            eta_s,
        }
    }

    fn kind(&self) -> ComponentKind {
        ComponentKind::BeamSplitter {
            t: self.t,
            r: self.r,
            phi: self.phi,
            eta_s: self.eta_s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PbsSpec {
    #[serde(default)]
    pub extinction_t: f64,
    #[serde(default)]
    pub extinction_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorSpec {
    #[serde(default = "one")]
    pub r_s: f64,
    #[serde(default = "one")]
    pub r_p: f64,
    #[serde(default)]
    pub phase_s: f64,
    #[serde(default)]
    pub phase_p: f64,
}

impl Default for MirrorSpec {
    fn default() -> Self {
        MirrorSpec {
            r_s: 1.0,
            r_p: 1.0,
            phase_s: 0.0,
            phase_p: 0.0,
        }
    }
}

impl MirrorSpec {
    fn kind(&self) -> ComponentKind {
        ComponentKind::Mirror {
            r_s: self.r_s,
            r_p: self.r_p,
            phase_s: self.phase_s,
            phase_p: self.phase_p,
        }
    }
}

/// Parameters of the filter. The same `bs1` values apply to both passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsiParams {
    pub bs1: SplitterSpec,
    pub phase_g: f64,
    pub hwp1_theta: f64,
    pub hwp2_theta: f64,
    pub hwp3_theta: f64,
    pub pbs1: PbsSpec,
    pub pbs2: PbsSpec,
    pub bs2: SplitterSpec,
    pub mirror: MirrorSpec,
    #[serde(default)]
    pub gt_extinction: f64,
}

impl DsiParams {
    pub fn ideal() -> Self {
        DsiParams {
            bs1: SplitterSpec::balanced(),
            phase_g: 0.0,
            hwp1_theta: FRAC_PI_4,
            hwp2_theta: FRAC_PI_8,
            hwp3_theta: FRAC_PI_4,
            pbs1: PbsSpec::default(),
            pbs2: PbsSpec::default(),
            bs2: SplitterSpec::balanced(),
            mirror: MirrorSpec::default(),
            gt_extinction: 0.0,
        }
    }

    pub fn with_phase(mut self, phase_g: f64) -> Self {
        self.phase_g = phase_g;
        self
    }

    pub fn with_eta_s(mut self, eta_s: f64) -> Self {
        self.bs1.eta_s = eta_s;
        self
    }
}

impl Default for DsiParams {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Builds the canonical filter netlist.
///
/// Stage names: `gt`, `bs1_pass1`, `gp`, `m{t,m,r}_a`, `hwp1`, `m{r,m,t}_c`,
/// `bs1_pass2`, `pbs1`, `hwp3`, `bs2`, `hwp2`, `pbs2`. Internal paths are
/// [`PATH_A`], [`PATH_C`], [`PATH_U`] and [`PATH_L`]; the detector port is
/// [`PORT_PM`].
pub fn build_dsi_filter(params: &DsiParams) -> Result<OpticalCircuit> {
    if !(params.bs1.eta_s > 0.0 && params.bs1.eta_s <= 1.0) {
        return Err(OpticsError::Config(format!(
            "bs1.eta_s = {} must lie in (0, 1]",
            params.bs1.eta_s
        )));
    }
    let mirror = params.mirror.kind();
    let pbs = |spec: &PbsSpec| ComponentKind::PolarizingBeamSplitter {
        extinction_t: spec.extinction_t,
        extinction_r: spec.extinction_r,
    };
    let hwp = |theta| ComponentKind::HalfWavePlate { theta };
    let components = vec![
        Component::inline(
            "gt",
            ComponentKind::Polarizer {
                axis: 0.0,
                extinction: params.gt_extinction,
            },
            "in",
        ),
        Component::new(
            "bs1_pass1",
            params.bs1.kind(),
            &["in", "bs1_dark"],
            &[PATH_A, PATH_C],
        ),
        Component::inline(
            "gp",
            ComponentKind::PhasePlate {
                phase: params.phase_g,
            },
            PATH_A,
        ),
        Component::inline("mt_a", mirror, PATH_A),
        Component::inline("mm_a", mirror, PATH_A),
        Component::inline("mr_a", mirror, PATH_A),
        Component::inline("hwp1", hwp(params.hwp1_theta), PATH_C),
        Component::inline("mr_c", mirror, PATH_C),
        Component::inline("mm_c", mirror, PATH_C),
        Component::inline("mt_c", mirror, PATH_C),
        Component::new(
            "bs1_pass2",
            params.bs1.kind(),
            &[PATH_A, PATH_C],
            &[PATH_U, PATH_L],
        ),
        Component::new(
            "pbs1",
            pbs(&params.pbs1),
            &[PATH_U, "pbs1_dark"],
            &["U_h", "discard_10"],
        ),
        Component::inline("hwp3", hwp(params.hwp3_theta), "U_h"),
        Component::new(
            "bs2",
            params.bs2.kind(),
            &["U_h", "bs2_dark"],
            &["U_00", "discard_bs2"],
        ),
        Component::inline("hwp2", hwp(params.hwp2_theta), PATH_L),
        Component::new(
            "pbs2",
            pbs(&params.pbs2),
            &[PATH_L, "U_00"],
            &[PORT_PM, "discard_pbs2"],
        ),
    ];
    OpticalCircuit::new(
        "in",
        ["bs1_dark", "pbs1_dark", "bs2_dark"]
            .map(String::from)
            .to_vec(),
        components,
        vec![PORT_PM.to_string()],
    )
    .map_err(|e| OpticsError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{ModeState, Polarization::*};
    use num_complex::Complex64;
    use std::f64::consts::{PI, TAU};

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pm(params: &DsiParams, blocked: &[&str]) -> f64 {
        build_dsi_filter(params)
            .unwrap()
            .port_powers(blocked)
            .unwrap()[PORT_PM]
    }

    #[test]
    fn state_checkpoints_match_closed_forms() {
        for phase_g in [0.0, 0.7, -2.1] {
            let circuit = build_dsi_filter(&DsiParams::ideal().with_phase(phase_g)).unwrap();
            let g = Complex64::from_polar(1.0, phase_g);
            let s = FRAC_1_SQRT_2;

            let mut psi1 = ModeState::new();
            psi1.set(PATH_A, H, c(s, 0.0));
            psi1.set(PATH_C, H, c(0.0, s));
            let got = circuit.state_after("bs1_pass1", &[]).unwrap();
            assert!(got.max_abs_diff(&psi1) < TOL);

            let mut psi2 = ModeState::new();
            psi2.set(PATH_A, H, g * s);
            psi2.set(PATH_C, V, c(0.0, s));
            let got = circuit.state_before("bs1_pass2", &[]).unwrap();
            assert!(got.max_abs_diff(&psi2) < TOL);

            let mut psi3 = ModeState::new();
            psi3.set(PATH_U, H, g * 0.5);
            psi3.set(PATH_U, V, c(-0.5, 0.0));
            psi3.set(PATH_L, H, g * c(0.0, 0.5));
            psi3.set(PATH_L, V, c(0.0, 0.5));
            let got = circuit.state_after("bs1_pass2", &[]).unwrap();
            assert!(got.max_abs_diff(&psi3) < TOL);
        }
    }

    #[test]
    fn ideal_filter_output_is_five_eighths() {
        assert!((pm(&DsiParams::ideal(), &[]) - 0.625).abs() < TOL);
    }

    #[test]
    fn substrate_loss_enters_squared() {
        let eta = 0.9356;
        let got = pm(&DsiParams::ideal().with_eta_s(eta), &[]);
        assert!((got - eta * eta * 0.625).abs() < TOL);
    }

    #[test]
    fn blocked_branch_powers() {
        let eta: f64 = 0.9;
        let p = DsiParams::ideal().with_eta_s(eta);
        // 01 alone: t·r = 1/2 amplitude, halved in power by the Hadamard/PBS₂ pair.
        assert!((pm(&p, &[PATH_U, PATH_C]) - eta.powi(2) * 0.25 * 0.5).abs() < TOL);
        assert!((pm(&p, &[PATH_U, PATH_A]) - eta.powi(2) * 0.25 * 0.5).abs() < TOL);
        assert!((pm(&p, &[PATH_L]) - eta.powi(2) * 0.25 * 0.5).abs() < TOL);
        // 01 and 11 interfering constructively.
        assert!((pm(&p, &[PATH_U]) - eta.powi(2) * 0.5).abs() < TOL);
        assert_eq!(pm(&p, &[PATH_A, PATH_C]), 0.0);
    }

    #[test]
    fn lossless_filter_conserves_total_power() {
        for phase_g in [0.0, 1.3] {
            let circuit = build_dsi_filter(&DsiParams::ideal().with_phase(phase_g)).unwrap();
            let total: f64 = circuit.terminal_powers(&[]).unwrap().values().sum();
            assert!((total - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn glass_plate_sweep_is_sinusoidal() {
        let powers: Vec<f64> = (0..64)
            .map(|k| pm(&DsiParams::ideal().with_phase(TAU * k as f64 / 64.0), &[]))
            .collect();
        let max = powers.iter().cloned().fold(f64::MIN, f64::max);
        let min = powers.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(powers[0], max);
        // 00 contributes a constant 1/8; the interfering branch swings 0 → 1/2.
        assert!((max - 0.625).abs() < TOL);
        assert!((min - 0.125).abs() < TOL);
        let branch = |p: f64| p - 0.125;
        let visibility = (branch(max) - branch(min)) / (branch(max) + branch(min));
        assert!((visibility - 1.0).abs() < TOL);
        for (k, p) in powers.iter().enumerate() {
            let phase = TAU * k as f64 / 64.0;
            assert!((p - (0.125 + 0.25 * (1.0 + phase.cos()))).abs() < TOL);
        }
        assert!((pm(&DsiParams::ideal().with_phase(PI), &[]) - 0.125).abs() < TOL);
    }

    #[test]
    fn invalid_eta_is_a_config_error() {
        let err = build_dsi_filter(&DsiParams::ideal().with_eta_s(1.2)).unwrap_err();
        assert_eq!(err.code(), "optics.config");
    }

    #[test]
    fn params_json_requires_fields() {
        let json = serde_json::to_string(&DsiParams::ideal()).unwrap();
        let back: DsiParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, DsiParams::ideal());
        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v.as_object_mut().unwrap().remove("hwp2_theta");
        let err = serde_json::from_value::<DsiParams>(v).unwrap_err();
        assert!(err.to_string().contains("hwp2_theta"));
    }
}
