use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => f.write_str("H"),
            Polarization::V => f.write_str("V"),
        }
    }
}

/// Jones vector `[H, V]` carried by one path.
pub type Jones = [Complex64; 2];

pub(crate) const ZERO: Jones = [Complex64 { re: 0.0, im: 0.0 }; 2];

/// Complex amplitudes indexed by path label and polarization.
///
/// Only live paths are stored; a path that is present may still carry zero
/// amplitude (an open, unilluminated port).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeState {
    paths: BTreeMap<String, Jones>,
}

impl ModeState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Unit amplitude on one mode.
    pub fn single(path: impl Into<String>, pol: Polarization) -> Self {
        let mut s = Self::new();
        s.set(path, pol, Complex64::new(1.0, 0.0));
        s
    }

    /// Adds an empty (vacuum) path.
    pub fn with_vacuum(mut self, path: impl Into<String>) -> Self {
        self.paths.entry(path.into()).or_insert(ZERO);
        self
    }

    pub fn set(&mut self, path: impl Into<String>, pol: Polarization, amp: Complex64) {
        self.paths.entry(path.into()).or_insert(ZERO)[pol.index()] = amp;
    }

    /// Amplitude on a mode; absent paths read as zero.
    pub fn get(&self, path: &str, pol: Polarization) -> Complex64 {
        self.paths
            .get(path)
            .map(|j| j[pol.index()])
            .unwrap_or_default()
    }

    pub fn jones(&self, path: &str) -> Option<Jones> {
        self.paths.get(path).copied()
    }

    pub fn contains(&self, path: &str) -> bool {
        self.paths.contains_key(path)
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.paths.keys().map(String::as_str)
    }

    pub fn modes(&self) -> impl Iterator<Item = (&str, Polarization, Complex64)> {
        self.paths.iter().flat_map(|(p, j)| {
            Polarization::BOTH
                .into_iter()
                .map(move |pol| (p.as_str(), pol, j[pol.index()]))
        })
    }

    /// `Σ|a|²` over both polarizations of one path.
    pub fn path_power(&self, path: &str) -> f64 {
        self.paths
            .get(path)
            .map(|j| j.iter().map(Complex64::norm_sqr).sum())
            .unwrap_or(0.0)
    }

    pub fn total_power(&self) -> f64 {
        self.paths.keys().map(|p| self.path_power(p)).sum()
    }

    /// Zeroes a path in place, leaving it live.
    pub fn block(&mut self, path: &str) {
        if let Some(j) = self.paths.get_mut(path) {
            *j = ZERO;
        }
    }

    pub(crate) fn take(&mut self, path: &str) -> Option<Jones> {
        self.paths.remove(path)
    }

    pub(crate) fn insert(&mut self, path: String, jones: Jones) {
        self.paths.insert(path, jones);
    }

    /// Largest componentwise difference, treating absent modes as zero.
    pub fn max_abs_diff(&self, other: &ModeState) -> f64 {
        self.paths
            .keys()
            .chain(other.paths.keys())
            .flat_map(|p| {
                Polarization::BOTH
                    .into_iter()
                    .map(move |pol| (self.get(p, pol) - other.get(p, pol)).norm())
            })
            .fold(0.0, f64::max)
    }
}
