use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::component::Component;
use super::state::{ModeState, Polarization};
use super::{OpticsError, Result};

/// State snapshot after a named component.
#[derive(Debug, Clone)]
pub struct StageState {
    pub component: String,
    pub state: ModeState,
}

/// An ordered netlist. Light enters on `input_port`; every label in
/// `open_ports` starts live with zero amplitude (unused splitter inputs).
/// Each component consumes its input labels and creates its output labels,
/// so a label is fed exactly once and the wiring cannot loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalCircuit {
    pub input_port: String,
    #[serde(default = "default_input_polarization")]
    pub input_polarization: Polarization,
    #[serde(default)]
    pub open_ports: Vec<String>,
    pub components: Vec<Component>,
    pub monitored_ports: Vec<String>,
}

fn default_input_polarization() -> Polarization {
    Polarization::H
}

impl OpticalCircuit {
    /// Builds and validates a circuit.
    pub fn new(
        input_port: impl Into<String>,
        open_ports: Vec<String>,
        components: Vec<Component>,
        monitored_ports: Vec<String>,
    ) -> Result<Self> {
        let circuit = OpticalCircuit {
            input_port: input_port.into(),
            input_polarization: Polarization::H,
            open_ports,
            components,
            monitored_ports,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    /// Parses a netlist document. Syntax errors report line and column;
    /// component errors report the component index.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| OpticsError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        let obj = value
            .as_object()
            .ok_or_else(|| OpticsError::Config("netlist must be a JSON object".into()))?;
        let raw_components = obj
            .get("components")
            .and_then(|c| c.as_array())
            .ok_or_else(|| OpticsError::Config("missing `components` array".into()))?;
        let components = raw_components
            .iter()
            .enumerate()
            .map(|(index, raw)| {
                Component::deserialize(raw).map_err(|e| OpticsError::Parameter {
                    index,
                    name: raw
                        .get("name")
                        .and_then(|n| n.as_str())
                        .unwrap_or("<unnamed>")
                        .to_string(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let field = |key: &str| -> Result<serde_json::Value> {
            Ok(obj.get(key).cloned().unwrap_or(serde_json::Value::Null))
        };
        let input_port: String = serde_json::from_value(field("input_port")?)
            .map_err(|e| OpticsError::Config(format!("input_port: {e}")))?;
        let input_polarization = match obj.get("input_polarization") {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| OpticsError::Config(format!("input_polarization: {e}")))?,
            None => Polarization::H,
        };
        let open_ports: Vec<String> = match obj.get("open_ports") {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| OpticsError::Config(format!("open_ports: {e}")))?,
            None => Vec::new(),
        };
        let monitored_ports: Vec<String> = serde_json::from_value(field("monitored_ports")?)
            .map_err(|e| OpticsError::Config(format!("monitored_ports: {e}")))?;
        let circuit = OpticalCircuit {
            input_port,
            input_polarization,
            open_ports,
            components,
            monitored_ports,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    /// Checks parameter ranges and traces label flow through the netlist.
    pub fn validate(&self) -> Result<()> {
        let mut live: BTreeSet<&str> = BTreeSet::new();
        live.insert(&self.input_port);
        for p in &self.open_ports {
            if !live.insert(p) {
                return Err(OpticsError::Port(format!("port {p:?} declared twice")));
            }
        }
        for (index, c) in self.components.iter().enumerate() {
            let wiring = |message: String| OpticsError::Wiring {
                index,
                name: c.name.clone(),
                message,
            };
            c.kind
                .validate()
                .map_err(|message| OpticsError::Parameter {
                    index,
                    name: c.name.clone(),
                    message,
                })?;
            c.check_ports().map_err(wiring)?;
            for p in &c.inputs {
                if !live.remove(p.as_str()) {
                    return Err(wiring(format!("input port {p:?} is not live")));
                }
            }
            for p in &c.outputs {
                if !live.insert(p) {
                    return Err(wiring(format!("output port {p:?} is already live")));
                }
            }
        }
        for p in &self.monitored_ports {
            if !live.contains(p.as_str()) {
                return Err(OpticsError::Port(format!(
                    "monitored port {p:?} is not a circuit output"
                )));
            }
        }
        Ok(())
    }

    /// Every label that appears anywhere in the netlist.
    pub fn labels(&self) -> BTreeSet<&str> {
        std::iter::once(self.input_port.as_str())
            .chain(self.open_ports.iter().map(String::as_str))
            .chain(
                self.components
                    .iter()
                    .flat_map(|c| c.inputs.iter().chain(&c.outputs).map(String::as_str)),
            )
            .collect()
    }

    /// Labels live after the last component.
    pub fn terminal_ports(&self) -> Vec<String> {
        let mut live: BTreeSet<String> = std::iter::once(self.input_port.clone())
            .chain(self.open_ports.iter().cloned())
            .collect();
        for c in &self.components {
            for p in &c.inputs {
                live.remove(p);
            }
            live.extend(c.outputs.iter().cloned());
        }
        live.into_iter().collect()
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn component_mut(&mut self, name: &str) -> Option<&mut Component> {
        self.components.iter_mut().find(|c| c.name == name)
    }

    fn initial_state(&self) -> ModeState {
        let mut s = ModeState::new();
        s.set(
            self.input_port.clone(),
            self.input_polarization,
            Complex64::new(1.0, 0.0),
        );
        self.open_ports
            .iter()
            .fold(s, |s, p| s.with_vacuum(p.clone()))
    }

    fn check_blocked<'a>(&self, blocked: &'a [&'a str]) -> Result<()> {
        let labels = self.labels();
        match blocked.iter().find(|b| !labels.contains(**b)) {
            Some(bad) => Err(OpticsError::Port(format!("unknown path label {bad:?}"))),
            None => Ok(()),
        }
    }

    /// Propagates unit input power, recording the state after every
    /// component. Blocked paths are zeroed whenever they are live.
    pub fn propagate_trace(&self, blocked: &[&str]) -> Result<Vec<StageState>> {
        self.check_blocked(blocked)?;
        let mut state = self.initial_state();
        let zero_blocked = |s: &mut ModeState| blocked.iter().for_each(|b| s.block(b));
        zero_blocked(&mut state);
        let mut trace = Vec::with_capacity(self.components.len());
        for (index, c) in self.components.iter().enumerate() {
            c.apply_in_place(&mut state)
                .map_err(|message| OpticsError::Wiring {
                    index,
                    name: c.name.clone(),
                    message,
                })?;
            zero_blocked(&mut state);
            trace.push(StageState {
                component: c.name.clone(),
                state: state.clone(),
            });
        }
        Ok(trace)
    }

    /// Final state at the circuit outputs.
    pub fn propagate(&self, blocked: &[&str]) -> Result<ModeState> {
        self.check_blocked(blocked)?;
        let mut state = self.initial_state();
        blocked.iter().for_each(|b| state.block(b));
        for (index, c) in self.components.iter().enumerate() {
            c.apply_in_place(&mut state)
                .map_err(|message| OpticsError::Wiring {
                    index,
                    name: c.name.clone(),
                    message,
                })?;
            blocked.iter().for_each(|b| state.block(b));
        }
        Ok(state)
    }

    /// State immediately after the named component.
    pub fn state_after(&self, component: &str, blocked: &[&str]) -> Result<ModeState> {
        self.propagate_trace(blocked)?
            .into_iter()
            .find(|s| s.component == component)
            .map(|s| s.state)
            .ok_or_else(|| OpticsError::Config(format!("no component named {component:?}")))
    }

    /// State immediately before the named component.
    pub fn state_before(&self, component: &str, blocked: &[&str]) -> Result<ModeState> {
        let index = self
            .components
            .iter()
            .position(|c| c.name == component)
            .ok_or_else(|| OpticsError::Config(format!("no component named {component:?}")))?;
        if index == 0 {
            let mut s = self.initial_state();
            blocked.iter().for_each(|b| s.block(b));
            return Ok(s);
        }
        let mut trace = self.propagate_trace(blocked)?;
        Ok(trace.swap_remove(index - 1).state)
    }

    /// Power at each monitored port relative to unit input power.
    pub fn port_powers(&self, blocked: &[&str]) -> Result<BTreeMap<String, f64>> {
        let out = self.propagate(blocked)?;
        Ok(self
            .monitored_ports
            .iter()
            .map(|p| (p.clone(), out.path_power(p)))
            .collect())
    }

    /// Power at every terminal port, discarded ones included.
    pub fn terminal_powers(&self, blocked: &[&str]) -> Result<BTreeMap<String, f64>> {
        let out = self.propagate(blocked)?;
        Ok(out
            .paths()
            .map(|p| (p.to_string(), out.path_power(p)))
            .collect())
    }
}
