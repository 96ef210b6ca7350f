//! From recorded power traces to a distribution of the measure, its
//! theoretical band under imperfections, and significance figures.

mod bootstrap;
mod measure;
mod phase;
mod pipeline;
mod stats;
mod synth;
mod theory;
mod trace;

use std::path::PathBuf;

use thiserror::Error;

pub use bootstrap::{bootstrap_probability, BootstrapConfig};
pub use measure::{
    corrected_probability, intensity_measure, measure_from_probability, transmittance, LOSS_FACTOR,
};
pub use phase::{extract_phase, phase_distribution, PhaseDistribution, MAX_REJECTION_FRACTION};
pub use pipeline::{
    run_pipeline, AnalysisReport, BandSummary, PipelineConfig, PipelineOutput, Significance,
    CLASSICAL_BOUND,
};
pub use stats::{
    freedman_diaconis_bins, histogram, percentile_sorted, significance, Bin, MeasureDistribution,
    SigmaConvention, Summary, LOWER_PERCENTILE, UPPER_PERCENTILE,
};
pub use synth::{synthesize_traces, Scenario};
pub use theory::{
    event_amplitudes, measure_at_phase, theoretical_measure, Dist, NoiseModel, MAX_RETRIES,
};
pub use trace::{Manifest, PowerTrace, TraceLabel, TraceSet, TRACE_CSV_HEADER};

use crate::optics::OpticsError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("input error: {0}")]
    Input(String),
    #[error("missing trace {0}")]
    MissingTrace(TraceLabel),
    #[error("{label}: window of {window} s does not fit a {duration} s trace")]
    WindowTooLong {
        label: TraceLabel,
        window: f64,
        duration: f64,
    },
    #[error("{label}: no samples in window [{start}, {start} + {width})")]
    EmptyWindow {
        label: TraceLabel,
        start: f64,
        width: f64,
    },
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("data quality: {:.1}% of phase samples rejected", rejection_fraction * 100.0)]
    DataQuality { rejection_fraction: f64 },
    #[error("unphysical parameters: {0}")]
    Unphysical(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: parse error at line {line}, column {column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

impl AnalysisError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalysisError::Input(_) => "analysis.input",
            AnalysisError::MissingTrace(_) => "analysis.missing_trace",
            AnalysisError::WindowTooLong { .. } => "analysis.window_too_long",
            AnalysisError::EmptyWindow { .. } => "analysis.empty_window",
            AnalysisError::Degenerate(_) => "analysis.degenerate",
            AnalysisError::DataQuality { .. } => "analysis.data_quality",
            AnalysisError::Unphysical(_) => "analysis.unphysical",
            AnalysisError::Io { .. } => "io",
            AnalysisError::Parse { .. } => "parse",
            AnalysisError::Optics(e) => e.code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, AnalysisError>;
