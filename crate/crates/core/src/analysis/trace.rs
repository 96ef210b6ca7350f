use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Result};

pub const TRACE_CSV_HEADER: [&str; 2] = ["timestamp_s", "power_w"];

/// Which power a trace records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraceLabel {
    #[serde(rename = "P_I")]
    Input,
    #[serde(rename = "P_E")]
    Event,
    #[serde(rename = "P_int")]
    Interference,
    #[serde(rename = "P_00")]
    H00,
    #[serde(rename = "P_01")]
    H01,
    #[serde(rename = "P_11")]
    H11,
    #[serde(rename = "P_T")]
    Transmitted,
    #[serde(rename = "P_R")]
    Reflected,
}

impl TraceLabel {
    pub const ALL: [TraceLabel; 8] = [
        TraceLabel::Input,
        TraceLabel::Event,
        TraceLabel::Interference,
        TraceLabel::H00,
        TraceLabel::H01,
        TraceLabel::H11,
        TraceLabel::Transmitted,
        TraceLabel::Reflected,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TraceLabel::Input => "P_I",
            TraceLabel::Event => "P_E",
            TraceLabel::Interference => "P_int",
            TraceLabel::H00 => "P_00",
            TraceLabel::H01 => "P_01",
            TraceLabel::H11 => "P_11",
            TraceLabel::Transmitted => "P_T",
            TraceLabel::Reflected => "P_R",
        }
    }
}

impl fmt::Display for TraceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TraceLabel {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self> {
        TraceLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| AnalysisError::Input(format!("unknown trace label {s:?}")))
    }
}

/// Timestamped power samples with strictly increasing timestamps.
///
/// Keeps a running sum so any window mean costs two binary searches.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    label: TraceLabel,
    times: Vec<f64>,
    powers: Vec<f64>,
    // Running sums of `power − baseline`; keeps window means of flat traces exact.
    baseline: f64,
    prefix: Vec<f64>,
}

impl PowerTrace {
    pub fn new(label: TraceLabel, times: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        if times.len() != powers.len() {
            return Err(AnalysisError::Input(format!(
                "{label}: {} timestamps but {} powers",
                times.len(),
                powers.len()
            )));
        }
        if times.is_empty() {
            return Err(AnalysisError::Input(format!("{label}: trace is empty")));
        }
        if let Some(k) = times
            .windows(2)
            .position(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(AnalysisError::Input(format!(
                "{label}: timestamps not strictly increasing at sample {}",
                k + 1
            )));
        }
        if !times[0].is_finite() {
            return Err(AnalysisError::Input(format!(
                "{label}: non-finite timestamp"
            )));
        }
        if let Some(k) = powers.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(AnalysisError::Input(format!(
                "{label}: power {} at sample {k} is negative or non-finite",
                powers[k]
            )));
        }
        let baseline = powers[0];
        let mut prefix = Vec::with_capacity(powers.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for p in &powers {
            acc += p - baseline;
            prefix.push(acc);
        }
        Ok(PowerTrace {
            label,
            times,
            powers,
            baseline,
            prefix,
        })
    }

    pub fn from_samples(label: TraceLabel, samples: &[(f64, f64)]) -> Result<Self> {
        let (times, powers) = samples.iter().copied().unzip();
        Self::new(label, times, powers)
    }

    pub fn label(&self) -> TraceLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn mean(&self) -> f64 {
        self.baseline + self.prefix[self.len()] / self.len() as f64
    }

    /// Mean power over samples with `start ≤ t < start + width`, or `None`
    /// when no sample falls inside.
    pub fn window_mean(&self, start: f64, width: f64) -> Option<f64> {
        let lo = self.times.partition_point(|&t| t < start);
        let hi = self.times.partition_point(|&t| t < start + width);
        (hi > lo).then(|| self.baseline + (self.prefix[hi] - self.prefix[lo]) / (hi - lo) as f64)
    }

    pub fn read_csv(label: TraceLabel, path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| AnalysisError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        if headers.iter().map(str::trim).ne(TRACE_CSV_HEADER) {
            return Err(AnalysisError::Input(format!(
                "{}: expected header \"timestamp_s,power_w\", found {:?}",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut powers = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| csv_error(path, e))?;
            let field = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| {
                        AnalysisError::Input(format!(
                            "{}: row {}: bad or missing column {}",
                            path.display(),
                            row + 2,
                            TRACE_CSV_HEADER[k]
                        ))
                    })
            };
            times.push(field(0)?);
            powers.push(field(1)?);
        }
        Self::new(label, times, powers)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| csv_error(path, e);
        let mut writer = csv::Writer::from_path(path).map_err(io)?;
        writer.write_record(TRACE_CSV_HEADER).map_err(io)?;
        for (t, p) in self.times.iter().zip(&self.powers) {
            writer
                .write_record([t.to_string(), p.to_string()])
                .map_err(io)?;
        }
        writer.flush().map_err(|e| AnalysisError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

fn csv_error(path: &Path, e: csv::Error) -> AnalysisError {
    AnalysisError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Labeled traces, as loaded from a manifest or produced by the generator.
#[derive(Debug, Clone, Default)]
pub struct TraceSet {
    traces: BTreeMap<TraceLabel, PowerTrace>,
}

impl TraceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, trace: PowerTrace) {
        self.traces.insert(trace.label(), trace);
    }

    pub fn get(&self, label: TraceLabel) -> Result<&PowerTrace> {
        self.traces
            .get(&label)
            .ok_or(AnalysisError::MissingTrace(label))
    }

    pub fn labels(&self) -> impl Iterator<Item = TraceLabel> + '_ {
        self.traces.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Loads every trace named by a manifest; relative paths resolve against
    /// the manifest's directory.
    pub fn load(manifest_path: &Path) -> Result<Self> {
        let manifest = Manifest::read(manifest_path)?;
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        let mut set = TraceSet::new();
        for (label, file) in &manifest.traces {
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base.join(file)
            };
            set.insert(PowerTrace::read_csv(*label, &path)?);
        }
        Ok(set)
    }

    /// Writes one CSV per trace plus `manifest.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| AnalysisError::Io {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut manifest = Manifest::default();
        for (label, trace) in &self.traces {
            let file = PathBuf::from(format!("{label}.csv"));
            trace.write_csv(&dir.join(&file))?;
            manifest.traces.insert(*label, file);
        }
        let path = dir.join("manifest.json");
        manifest.write(&path)?;
        Ok(path)
    }
}

/// Maps trace labels to CSV paths.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest {
    pub traces: BTreeMap<TraceLabel, PathBuf>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AnalysisError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| AnalysisError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| AnalysisError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_traces() {
        let t =
            |times: Vec<f64>, powers: Vec<f64>| PowerTrace::new(TraceLabel::Input, times, powers);
        assert!(t(vec![], vec![]).is_err());
        assert!(t(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(t(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(t(vec![0.0, 1.0], vec![1.0, -0.1]).is_err());
        assert!(t(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(t(vec![0.0, 1.0], vec![1.0, 0.0]).is_ok());
    }

    #[test]
    fn window_means() {
        let trace = PowerTrace::new(
            TraceLabel::Event,
            (0..10).map(f64::from).collect(),
            (0..10).map(f64::from).collect(),
        )
        .unwrap();
        assert_eq!(trace.duration(), 9.0);
        assert_eq!(trace.mean(), 4.5);
        assert_eq!(trace.window_mean(2.0, 3.0), Some(3.0));
        assert_eq!(trace.window_mean(1.5, 1.0), Some(2.0));
        assert_eq!(trace.window_mean(2.2, 0.5), None);
        assert_eq!(trace.window_mean(20.0, 5.0), None);
    }

    #[test]
    fn csv_round_trip_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut set = TraceSet::new();
        set.insert(
            PowerTrace::from_samples(
                TraceLabel::Input,
                &[(0.0, 1e-3), (0.1, 1.0000000000000002e-3)],
            )
            .unwrap(),
        );
        set.insert(PowerTrace::from_samples(TraceLabel::Event, &[(0.0, 0.1), (0.3, 0.7)]).unwrap());
        let manifest = set.save(dir.path()).unwrap();
        let text = fs::read_to_string(&manifest).unwrap();
        assert!(text.contains("\"P_I\": \"P_I.csv\""), "{text}");
        let back = TraceSet::load(&manifest).unwrap();
        assert_eq!(
            back.get(TraceLabel::Input).unwrap(),
            set.get(TraceLabel::Input).unwrap()
        );
        assert!(matches!(
            back.get(TraceLabel::Reflected),
            Err(AnalysisError::MissingTrace(TraceLabel::Reflected))
        ));
    }

    #[test]
    fn csv_header_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "time,power\n0,1\n").unwrap();
        assert!(PowerTrace::read_csv(TraceLabel::Input, &path).is_err());
        fs::write(&path, "timestamp_s,power_w\n0,1\n1,abc\n").unwrap();
        let err = PowerTrace::read_csv(TraceLabel::Input, &path).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }
}
