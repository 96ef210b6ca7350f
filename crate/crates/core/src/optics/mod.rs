//! Amplitude-level propagation of a single photon's (path, polarization)
//! modes through a netlist of linear optical components.

mod circuit;
mod component;
mod dsi;
mod state;

pub use circuit::{OpticalCircuit, StageState};
pub use component::{apply_component, Component, ComponentKind};
pub use dsi::{
    build_dsi_filter, DsiParams, MirrorSpec, PbsSpec, SplitterSpec, PATH_A, PATH_C, PATH_L, PATH_U,
    PORT_PM,
};
pub use state::{ModeState, Polarization};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("wiring error at component {index} ({name}): {message}")]
    Wiring {
        index: usize,
        name: String,
        message: String,
    },
    #[error("wiring error: {0}")]
    Port(String),
    #[error("invalid parameters for component {index} ({name}): {message}")]
    Parameter {
        index: usize,
        name: String,
        message: String,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("netlist parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl OpticsError {
    pub fn code(&self) -> &'static str {
        match self {
            OpticsError::Wiring { .. } | OpticsError::Port(_) => "optics.wiring",
            OpticsError::Parameter { .. } => "optics.parameter",
            OpticsError::Config(_) => "optics.config",
            OpticsError::Parse { .. } => "optics.parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, OpticsError>;
