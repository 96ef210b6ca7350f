use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{Jones, ModeState, ZERO};
use super::{OpticsError, Result};

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const LOSSLESS_TOL: f64 = 1e-12;

fn one() -> f64 {
    1.0
}

/// Component physics. Two-port kinds take inputs `[a, b]` and outputs `[c, d]`;
/// the rest take one input and one output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    /// Polarization-independent splitter. `a` transmits to `c` and reflects
    /// to `d`; `b` transmits to `d` and reflects to `c`. Every output
    /// amplitude carries an extra `√eta_s`.
    BeamSplitter {
        t: f64,
        r: f64,
        phi: f64,
        #[serde(default = "one")]
        eta_s: f64,
    },
    /// H on `a` transmits to `c`, V on `a` reflects to `d` (mirrored for `b`).
    /// `extinction_t` is the power fraction of V leaking into the transmit
    /// port, `extinction_r` the fraction of H leaking into the reflect port;
    /// leaked amplitude picks up a factor `i`.
    PolarizingBeamSplitter {
        #[serde(default)]
        extinction_t: f64,
        #[serde(default)]
        extinction_r: f64,
    },
    /// Ideal half-wave retarder with its fast axis at `theta` from horizontal.
    HalfWavePlate { theta: f64 },
    /// Uniform phase delay on both polarizations (e.g. a tilted glass plate).
    PhasePlate { phase: f64 },
    /// H is treated as p-polarized and V as s-polarized.
    Mirror {
        #[serde(default = "one")]
        r_s: f64,
        #[serde(default = "one")]
        r_p: f64,
        #[serde(default)]
        phase_s: f64,
        #[serde(default)]
        phase_p: f64,
    },
    /// Linear polarizer transmitting along `axis`; the orthogonal component
    /// passes with power fraction `extinction`.
    Polarizer {
        axis: f64,
        #[serde(default)]
        extinction: f64,
    },
}

impl ComponentKind {
    pub fn port_count(&self) -> usize {
        match self {
            ComponentKind::BeamSplitter { .. } | ComponentKind::PolarizingBeamSplitter { .. } => 2,
            _ => 1,
        }
    }

    /// Checks physical parameter ranges.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(format!("{name} = {v} must lie in [0, 1]"))
            }
        };
        match *self {
            ComponentKind::BeamSplitter { t, r, phi, eta_s } => {
                if !finite(&[t, r, phi, eta_s]) {
                    return Err("non-finite parameter".into());
                }
                unit("t", t)?;
                unit("r", r)?;
                if (t * t + r * r - 1.0).abs() > LOSSLESS_TOL {
                    return Err(format!("t² + r² = {} ≠ 1", t * t + r * r));
                }
                if !(eta_s > 0.0 && eta_s <= 1.0) {
                    return Err(format!("eta_s = {eta_s} must lie in (0, 1]"));
                }
                Ok(())
            }
            ComponentKind::PolarizingBeamSplitter {
                extinction_t,
                extinction_r,
            } => {
                unit("extinction_t", extinction_t)?;
                unit("extinction_r", extinction_r)
            }
            ComponentKind::HalfWavePlate { theta } => {
                if finite(&[theta]) {
                    Ok(())
                } else {
                    Err("non-finite theta".into())
                }
            }
            ComponentKind::PhasePlate { phase } => {
                if finite(&[phase]) {
                    Ok(())
                } else {
                    Err("non-finite phase".into())
                }
            }
            ComponentKind::Mirror {
                r_s,
                r_p,
                phase_s,
                phase_p,
            } => {
                if !finite(&[phase_s, phase_p]) {
                    return Err("non-finite phase".into());
                }
                unit("r_s", r_s)?;
                unit("r_p", r_p)
            }
            ComponentKind::Polarizer { axis, extinction } => {
                if !axis.is_finite() {
                    return Err("non-finite axis".into());
                }
                unit("extinction", extinction)
            }
        }
    }

    /// 2×2 Jones matrix for single-port kinds, acting on `[H, V]`.
    fn jones_matrix(&self) -> [[Complex64; 2]; 2] {
        let re = |v: f64| Complex64::new(v, 0.0);
        match *self {
            ComponentKind::HalfWavePlate { theta } => {
                let (s, c) = (2.0 * theta).sin_cos();
                [[re(c), re(s)], [re(s), re(-c)]]
            }
            ComponentKind::PhasePlate { phase } => {
                let p = Complex64::from_polar(1.0, phase);
                [[p, C0], [C0, p]]
            }
            ComponentKind::Mirror {
                r_s,
                r_p,
                phase_s,
                phase_p,
            } => [
                [Complex64::from_polar(r_p.sqrt(), phase_p), C0],
                [C0, Complex64::from_polar(r_s.sqrt(), phase_s)],
            ],
            ComponentKind::Polarizer { axis, extinction } => {
                let (s, c) = axis.sin_cos();
                let leak = extinction.sqrt();
                [
                    [re(c * c + leak * s * s), re(c * s * (1.0 - leak))],
                    [re(c * s * (1.0 - leak)), re(s * s + leak * c * c)],
                ]
            }
            ComponentKind::BeamSplitter { .. } | ComponentKind::PolarizingBeamSplitter { .. } => {
                unreachable!("two-port component has no single Jones matrix")
            }
        }
    }

    /// Maps input Jones vectors to output Jones vectors.
    fn transform(&self, inputs: &[Jones]) -> Vec<Jones> {
        match *self {
            ComponentKind::BeamSplitter { t, r, phi, eta_s } => {
                let (a, b) = (inputs[0], inputs[1]);
                let amp = eta_s.sqrt();
                let tt = Complex64::new(t * amp, 0.0);
                let rr = Complex64::from_polar(r * amp, phi);
                let mut c = ZERO;
                let mut d = ZERO;
                for k in 0..2 {
                    c[k] = tt * a[k] + rr * b[k];
                    d[k] = rr * a[k] + tt * b[k];
                }
                vec![c, d]
            }
            ComponentKind::PolarizingBeamSplitter {
                extinction_t,
                extinction_r,
            } => {
                let (a, b) = (inputs[0], inputs[1]);
                let pass_h = Complex64::new((1.0 - extinction_r).sqrt(), 0.0);
                let leak_h = Complex64::new(0.0, extinction_r.sqrt());
                let pass_v = Complex64::new((1.0 - extinction_t).sqrt(), 0.0);
                let leak_v = Complex64::new(0.0, extinction_t.sqrt());
                let c = [pass_h * a[0] + leak_h * b[0], leak_v * a[1] + pass_v * b[1]];
                let d = [leak_h * a[0] + pass_h * b[0], pass_v * a[1] + leak_v * b[1]];
                vec![c, d]
            }
            _ => {
                let m = self.jones_matrix();
                let v = inputs[0];
                vec![[
                    m[0][0] * v[0] + m[0][1] * v[1],
                    m[1][0] * v[0] + m[1][1] * v[1],
                ]]
            }
        }
    }
}

/// A component instance wired into a netlist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    #[serde(flatten)]
    pub kind: ComponentKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Component {
    pub fn new(
        name: impl Into<String>,
        kind: ComponentKind,
        inputs: &[&str],
        outputs: &[&str],
    ) -> Self {
        Component {
            name: name.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Single-port component acting in place on `path`.
    pub fn inline(name: impl Into<String>, kind: ComponentKind, path: &str) -> Self {
        Self::new(name, kind, &[path], &[path])
    }

    pub(crate) fn check_ports(&self) -> std::result::Result<(), String> {
        let n = self.kind.port_count();
        if self.inputs.len() != n || self.outputs.len() != n {
            return Err(format!(
                "expected {n} input and {n} output ports, found {} and {}",
                self.inputs.len(),
                self.outputs.len()
            ));
        }
        if n == 2 && (self.inputs[0] == self.inputs[1] || self.outputs[0] == self.outputs[1]) {
            return Err("port labels must be distinct".into());
        }
        Ok(())
    }

    /// Consumes the input paths from `state` and inserts the outputs.
    pub(crate) fn apply_in_place(&self, state: &mut ModeState) -> std::result::Result<(), String> {
        self.check_ports()?;
        if let Some(missing) = self.inputs.iter().find(|p| !state.contains(p)) {
            return Err(format!("unknown input port {missing:?}"));
        }
        let inputs: Vec<Jones> = self
            .inputs
            .iter()
            .map(|p| state.take(p).expect("checked above"))
            .collect();
        if let Some(clash) = self.outputs.iter().find(|p| state.contains(p)) {
            return Err(format!("output port {clash:?} is already live"));
        }
        for (label, jones) in self.outputs.iter().zip(self.kind.transform(&inputs)) {
            state.insert(label.clone(), jones);
        }
        Ok(())
    }
}

/// Applies one component to a state, returning the transformed state.
pub fn apply_component(state: &ModeState, component: &Component) -> Result<ModeState> {
    component
        .kind
        .validate()
        .map_err(|message| OpticsError::Parameter {
            index: 0,
            name: component.name.clone(),
            message,
        })?;
    let mut out = state.clone();
    component
        .apply_in_place(&mut out)
        .map_err(|m| OpticsError::Port(format!("{}: {m}", component.name)))?;
    Ok(out)
}
