//! Quantum measures of history events for two-site hoppers, an amplitude-level
//! simulator of the ancilla-based optical event filter, and the power-trace
//! analysis pipeline that turns recorded powers into a measure distribution.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod histories;
pub mod optics;

pub use histories::{
    is_serial, BeamsplitterParams, Event, History, HistoryError, HistorySpace, HopperModel,
    StepRole,
};
pub use optics::{build_dsi_filter, DsiParams, ModeState, OpticalCircuit, OpticsError};
