//! Histories, events and quantum measures for finite two-site hoppers.
//!
//! A history is a sequence of site labels in `{0, 1}`, one per beamsplitter
//! traversal. Each step either transmits or reflects the particle; which site
//! label a reflection leads to is set by the model's [`StepRole`] table. The
//! quantum measure of an event sums `A(γ) A*(γ')` over pairs of member
//! histories that end on the same site.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used for all complex-arithmetic equality checks.
pub const TOLERANCE: f64 = 1e-12;

/// Default cap on the number of hopper steps (2^24 histories).
pub const DEFAULT_MAX_STEPS: usize = 24;

/// Histories are packed into a `u64`, so no override may exceed this.
pub const HARD_MAX_STEPS: usize = 63;

pub type Amplitude = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistoryError {
    #[error("history has {found} steps but the model has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("history {history:?} has invalid site label {site:?}: expected '0' or '1'")]
    InvalidSite { history: String, site: char },
    #[error("history must have at least one step")]
    EmptyHistory,
    #[error("duplicate history {0} in event")]
    DuplicateHistory(String),
    #[error("event mixes histories of length {0} and {1}")]
    MixedLengths(usize, usize),
    #[error("invalid beamsplitter parameters: {0}")]
    InvalidBeamsplitter(String),
    #[error("model must have at least one step")]
    EmptyModel,
    #[error("role table has {found} entries but the model has {expected} steps")]
    RoleTableLength { expected: usize, found: usize },
    #[error("{requested} steps exceeds the configured limit of {limit}")]
    StepLimit { requested: usize, limit: usize },
    #[error("non-finite amplitude for history {0}")]
    NonFinite(String),
    #[error("measure has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

impl HistoryError {
    /// Stable machine-readable code for error envelopes.
    pub fn code(&self) -> &'static str {
        match self {
            HistoryError::LengthMismatch { .. } => "history.length_mismatch",
            HistoryError::InvalidSite { .. } => "history.invalid_site",
            HistoryError::EmptyHistory => "history.empty",
            HistoryError::DuplicateHistory(_) => "event.duplicate_history",
            HistoryError::MixedLengths(..) => "event.mixed_lengths",
            HistoryError::InvalidBeamsplitter(_) => "model.invalid_beamsplitter",
            HistoryError::EmptyModel => "model.empty",
            HistoryError::RoleTableLength { .. } => "model.role_table_length",
            HistoryError::StepLimit { .. } => "config.step_limit",
            HistoryError::NonFinite(_) => "measure.non_finite",
            HistoryError::ImaginaryResidue(_) => "measure.imaginary_residue",
        }
    }
}

pub type Result<T> = std::result::Result<T, HistoryError>;

/// A sequence of site labels. The first step is the most significant bit, so
/// the derived ordering is lexicographic among histories of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    len: u8,
    bits: u64,
}

impl History {
    pub fn new(sites: &[u8]) -> Result<Self> {
        if sites.is_empty() {
            return Err(HistoryError::EmptyHistory);
        }
        if sites.len() > HARD_MAX_STEPS {
            return Err(HistoryError::StepLimit {
                requested: sites.len(),
                limit: HARD_MAX_STEPS,
            });
        }
        let mut bits = 0u64;
        for &s in sites {
            if s > 1 {
                return Err(HistoryError::InvalidSite {
                    history: sites.iter().map(|v| v.to_string()).collect(),
                    site: char::from(b'0' + s.min(9)),
                });
            }
            bits = (bits << 1) | u64::from(s);
        }
        Ok(History {
            len: sites.len() as u8,
            bits,
        })
    }

    /// Builds a history from packed bits; only the low `len` bits are kept.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(
            (1..=HARD_MAX_STEPS).contains(&len),
            "history length {len} out of range"
        );
        History {
            len: len as u8,
            bits: bits & ((1u64 << len) - 1),
        }
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Site label after step `k` (zero-based).
    pub fn site(&self, k: usize) -> u8 {
        debug_assert!(k < self.len());
        ((self.bits >> (self.len() - 1 - k)) & 1) as u8
    }

    pub fn sites(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |k| self.site(k))
    }

    /// Final site label.
    pub fn endpoint(&self) -> u8 {
        (self.bits & 1) as u8
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sites() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for History {
    type Err = HistoryError;

    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(HistoryError::InvalidSite {
                    history: s.trim().to_string(),
                    site: other,
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        History::new(&sites)
    }
}

/// The full set of `2^n` histories of an `n`-step hopper, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistorySpace {
    n_steps: usize,
    histories: Vec<History>,
}

impl HistorySpace {
    pub fn new(n_steps: usize) -> Result<Self> {
        Self::with_limit(n_steps, DEFAULT_MAX_STEPS)
    }

    /// Enumerates with an explicit step cap (still bounded by [`HARD_MAX_STEPS`]).
    pub fn with_limit(n_steps: usize, limit: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(HistoryError::EmptyModel);
        }
        let limit = limit.min(HARD_MAX_STEPS);
        if n_steps > limit {
            return Err(HistoryError::StepLimit {
                requested: n_steps,
                limit,
            });
        }
        let histories = (0..1u64 << n_steps)
            .map(|bits| History::from_bits(bits, n_steps))
            .collect();
        Ok(HistorySpace { n_steps, histories })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn len(&self) -> usize {
        self.histories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histories.is_empty()
    }

    /// Ω itself, as an event.
    pub fn full_event(&self) -> Event {
        Event {
            members: self.histories.clone(),
            label: Some("Ω".into()),
        }
    }

    /// Every subset of the space. Only sensible for tiny spaces.
    pub fn all_events(&self) -> impl Iterator<Item = Event> + '_ {
        assert!(
            self.len() <= 16,
            "power set of {} histories is too large",
            self.len()
        );
        (0..1u64 << self.len()).map(move |mask| Event {
            members: self
                .histories
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, h)| *h)
                .collect(),
            label: None,
        })
    }
}

/// A set of histories, stored in canonical sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Event {
    members: Vec<History>,
    label: Option<String>,
}

impl Event {
    /// Builds an event, rejecting duplicates and histories of mixed length.
    pub fn new<I: IntoIterator<Item = History>>(members: I) -> Result<Self> {
        let mut members: Vec<History> = members.into_iter().collect();
        members.sort();
        for pair in members.windows(2) {
            if pair[0].len() != pair[1].len() {
                return Err(HistoryError::MixedLengths(pair[0].len(), pair[1].len()));
            }
            if pair[0] == pair[1] {
                return Err(HistoryError::DuplicateHistory(pair[0].to_string()));
            }
        }
        Ok(Event {
            members,
            label: None,
        })
    }

    pub fn empty() -> Self {
        Event {
            members: Vec::new(),
            label: None,
        }
    }

    /// Parses bit-strings such as `["00", "01", "11"]`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let members = items
            .iter()
            .map(|s| s.as_ref().parse::<History>())
            .collect::<Result<Vec<_>>>()?;
        Event::new(members)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn members(&self) -> &[History] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, h: &History) -> bool {
        self.members.binary_search(h).is_ok()
    }

    /// Step count shared by all members, if any.
    pub fn n_steps(&self) -> Option<usize> {
        self.members.first().map(History::len)
    }

    pub fn complement(&self, space: &HistorySpace) -> Result<Event> {
        self.check_in(space.n_steps())?;
        Ok(Event {
            members: space
                .histories()
                .iter()
                .filter(|h| !self.contains(h))
                .copied()
                .collect(),
            label: self.label.as_ref().map(|l| format!("¬{l}")),
        })
    }

    fn check_in(&self, n_steps: usize) -> Result<()> {
        match self.n_steps() {
            Some(found) if found != n_steps => Err(HistoryError::LengthMismatch {
                expected: n_steps,
                found,
            }),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<String>> for Event {
    type Error = HistoryError;

    fn try_from(items: Vec<String>) -> Result<Self> {
        Event::parse(&items)
    }
}

impl From<Event> for Vec<String> {
    fn from(e: Event) -> Self {
        e.members.iter().map(History::to_string).collect()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members.iter().map(History::to_string).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Real transmission/reflection coefficients plus a reflection phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBeamsplitter")]
pub struct BeamsplitterParams {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
}

#[derive(Deserialize)]
struct RawBeamsplitter {
    t: f64,
    r: f64,
    phi: f64,
}

impl TryFrom<RawBeamsplitter> for BeamsplitterParams {
    type Error = HistoryError;

    fn try_from(raw: RawBeamsplitter) -> Result<Self> {
        BeamsplitterParams::new(raw.t, raw.r, raw.phi)
    }
}

impl BeamsplitterParams {
    pub fn new(t: f64, r: f64, phi: f64) -> Result<Self> {
        if ![t, r, phi].iter().all(|v| v.is_finite()) {
            return Err(HistoryError::InvalidBeamsplitter("non-finite value".into()));
        }
        if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&r) {
            return Err(HistoryError::InvalidBeamsplitter(format!(
                "t = {t}, r = {r} must lie in [0, 1]"
            )));
        }
        if (t * t + r * r - 1.0).abs() > TOLERANCE {
            return Err(HistoryError::InvalidBeamsplitter(format!(
                "t² + r² = {} ≠ 1",
                t * t + r * r
            )));
        }
        Ok(BeamsplitterParams { t, r, phi })
    }

    /// Derives `r = √(1 − t²)`.
    pub fn from_transmission(t: f64, phi: f64) -> Result<Self> {
        Self::new(t, (1.0 - t * t).max(0.0).sqrt(), phi)
    }

    /// Symmetric 50:50 splitter with reflection phase π/2.
    pub fn balanced() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        BeamsplitterParams {
            t: s,
            r: s,
            phi: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn reflection(&self) -> Amplitude {
        Complex64::from_polar(self.r, self.phi)
    }

    /// With real `t`, the 2×2 step matrix is unitary only when `r t cos φ = 0`.
    pub fn is_unitary(&self) -> bool {
        (self.r * self.t * self.phi.cos()).abs() <= TOLERANCE
    }
}

/// Which site label a reflection at a given step leads to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepRole {
    /// Reflection keeps the previous site; transmission hops.
    #[default]
    ReflectKeeps,
    /// Reflection hops to the other site; transmission keeps it.
    ReflectSwitches,
}

/// An ordered chain of beamsplitters. The particle starts on site 0.
///
/// Without an explicit role table every step uses [`StepRole::ReflectKeeps`],
/// which reproduces the two-step table
/// `A(00) = r₁e^{iφ₁}r₂e^{iφ₂}`, `A(01) = r₁e^{iφ₁}t₂`, `A(10) = t₁t₂`,
/// `A(11) = t₁r₂e^{iφ₂}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct HopperModel {
    steps: Vec<BeamsplitterParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    role_table: Option<Vec<StepRole>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    steps: Vec<BeamsplitterParams>,
    #[serde(default)]
    role_table: Option<Vec<StepRole>>,
}

impl TryFrom<RawModel> for HopperModel {
    type Error = HistoryError;

    fn try_from(raw: RawModel) -> Result<Self> {
        let model = HopperModel::new(raw.steps)?;
        match raw.role_table {
            Some(roles) => model.with_role_table(roles),
            None => Ok(model),
        }
    }
}

impl HopperModel {
    pub fn new(steps: Vec<BeamsplitterParams>) -> Result<Self> {
        if steps.is_empty() {
            return Err(HistoryError::EmptyModel);
        }
        if steps.len() > HARD_MAX_STEPS {
            return Err(HistoryError::StepLimit {
                requested: steps.len(),
                limit: HARD_MAX_STEPS,
            });
        }
        Ok(HopperModel {
            steps,
            role_table: None,
        })
    }

    pub fn with_role_table(mut self, roles: Vec<StepRole>) -> Result<Self> {
        if roles.len() != self.steps.len() {
            return Err(HistoryError::RoleTableLength {
                expected: self.steps.len(),
                found: roles.len(),
            });
        }
        self.role_table = Some(roles);
        Ok(self)
    }

    /// Two balanced 50:50 splitters with φ = π/2.
    pub fn ideal() -> Self {
        HopperModel {
            steps: vec![BeamsplitterParams::balanced(); 2],
            role_table: None,
        }
    }

    pub fn steps(&self) -> &[BeamsplitterParams] {
        &self.steps
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn role(&self, k: usize) -> StepRole {
        self.role_table
            .as_ref()
            .map(|roles| roles[k])
            .unwrap_or_default()
    }

    pub fn is_unitary(&self) -> bool {
        self.steps.iter().all(BeamsplitterParams::is_unitary)
    }

    pub fn history_space(&self) -> Result<HistorySpace> {
        HistorySpace::new(self.n_steps())
    }

    /// Product of per-step factors: `t` on transmission, `r·e^{iφ}` on reflection.
    pub fn amplitude(&self, h: &History) -> Result<Amplitude> {
        self.check_len(h.len())?;
        let mut amp = Complex64::new(1.0, 0.0);
        let mut prev = 0u8;
        for (k, bs) in self.steps.iter().enumerate() {
            let site = h.site(k);
            let reflected = match self.role(k) {
                StepRole::ReflectKeeps => site == prev,
                StepRole::ReflectSwitches => site != prev,
            };
            amp *= if reflected {
                bs.reflection()
            } else {
                Complex64::new(bs.t, 0.0)
            };
            prev = site;
        }
        if !amp.re.is_finite() || !amp.im.is_finite() {
            return Err(HistoryError::NonFinite(h.to_string()));
        }
        Ok(amp)
    }

    /// Quantum measure of `e`, computed as `Σ_k |Σ_{γ∈e, end(γ)=k} A(γ)|²`.
    pub fn measure(&self, e: &Event) -> Result<f64> {
        e.check_in(self.n_steps())?;
        let mut by_endpoint = [Complex64::new(0.0, 0.0); 2];
        for h in e.members() {
            by_endpoint[usize::from(h.endpoint())] += self.amplitude(h)?;
        }
        Ok(by_endpoint.iter().map(Complex64::norm_sqr).sum())
    }

    /// Literal double sum `Σ_{i,j} A(γᵢ)A*(γⱼ) δ(end(γᵢ), end(γⱼ))`, term by term.
    ///
    /// Brute-force reference for [`HopperModel::measure`]; quadratic in `|e|`.
    pub fn measure_oracle(&self, e: &Event) -> Result<f64> {
        e.check_in(self.n_steps())?;
        let amps = e
            .members()
            .iter()
            .map(|h| self.amplitude(h))
            .collect::<Result<Vec<_>>>()?;
        let mut total = Complex64::new(0.0, 0.0);
        for (gi, ai) in e.members().iter().zip(&amps) {
            for (gj, aj) in e.members().iter().zip(&amps) {
                if gi.endpoint() == gj.endpoint() {
                    total += ai * aj.conj();
                }
            }
        }
        if total.im.abs() > TOLERANCE {
            return Err(HistoryError::ImaginaryResidue(total.im));
        }
        Ok(total.re)
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found != self.n_steps() {
            return Err(HistoryError::LengthMismatch {
                expected: self.n_steps(),
                found,
            });
        }
        Ok(())
    }
}

/// Whether `e` is the Cartesian product of its per-step site projections,
/// i.e. whether it can be singled out by blocking paths step by step.
pub fn is_serial(e: &Event, space: &HistorySpace) -> Result<bool> {
    e.check_in(space.n_steps())?;
    if e.is_empty() {
        return Ok(true);
    }
    let n = space.n_steps();
    let mut projections = vec![BTreeSet::new(); n];
    for h in e.members() {
        for (k, proj) in projections.iter_mut().enumerate() {
            proj.insert(h.site(k));
        }
    }
    // e is always contained in the product, so equal cardinality means equality.
    let product_size: usize = projections.iter().map(BTreeSet::len).product();
    Ok(product_size == e.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn ev(items: &[&str]) -> Event {
        Event::parse(items).unwrap()
    }

    #[test]
    fn enumerates_lexicographically() {
        let names = |n| {
            HistorySpace::new(n)
                .unwrap()
                .histories()
                .iter()
                .map(History::to_string)
                .collect::<Vec<_>>()
        };
        assert_eq!(names(1), ["0", "1"]);
        assert_eq!(names(2), ["00", "01", "10", "11"]);
        let three = names(3);
        assert_eq!(three.len(), 8);
        assert_eq!(three.first().unwrap(), "000");
        assert_eq!(three.last().unwrap(), "111");
    }

    #[test]
    fn step_limit_is_enforced() {
        assert!(matches!(
            HistorySpace::new(25),
            Err(HistoryError::StepLimit {
                requested: 25,
                limit: 24
            })
        ));
        assert!(HistorySpace::with_limit(3, 2).is_err());
        assert_eq!(HistorySpace::with_limit(3, 3).unwrap().len(), 8);
    }

    #[test]
    fn history_parsing_and_endpoint() {
        let h: History = "0110".parse().unwrap();
        assert_eq!(h.len(), 4);
        assert_eq!(h.endpoint(), 0);
        assert_eq!(h.sites().collect::<Vec<_>>(), [0, 1, 1, 0]);
        assert_eq!(h.to_string(), "0110");
        assert!(matches!(
            "012".parse::<History>(),
            Err(HistoryError::InvalidSite { site: '2', .. })
        ));
        assert!(matches!(
            "".parse::<History>(),
            Err(HistoryError::EmptyHistory)
        ));
    }

    #[test]
    fn events_are_canonical_sets() {
        let e = ev(&["11", "00", "01"]);
        assert_eq!(e.to_string(), "{00,01,11}");
        assert!(matches!(
            Event::parse(&["00", "00"]),
            Err(HistoryError::DuplicateHistory(_))
        ));
        assert!(matches!(
            Event::parse(&["00", "011"]),
            Err(HistoryError::MixedLengths(..))
        ));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"["00","01","11"]"#);
        assert_eq!(serde_json::from_str::<Event>(&json).unwrap(), e);
    }

    #[test]
    fn ideal_amplitude_table() {
        let m = HopperModel::ideal();
        let a = |s: &str| m.amplitude(&s.parse().unwrap()).unwrap();
        assert!((a("00") - Complex64::new(-0.5, 0.0)).norm() < TOLERANCE);
        assert!((a("01") - Complex64::new(0.0, 0.5)).norm() < TOLERANCE);
        assert!((a("10") - Complex64::new(0.5, 0.0)).norm() < TOLERANCE);
        assert!((a("11") - Complex64::new(0.0, 0.5)).norm() < TOLERANCE);
    }

    #[test]
    fn fully_transmitting_first_step_kills_reflected_branch() {
        let m = HopperModel::new(vec![
            BeamsplitterParams::new(1.0, 0.0, FRAC_PI_2).unwrap(),
            BeamsplitterParams::balanced(),
        ])
        .unwrap();
        for h in ["00", "01"] {
            assert_eq!(m.amplitude(&h.parse().unwrap()).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn asymmetric_amplitude() {
        let m = HopperModel::new(vec![
            BeamsplitterParams::new(0.8, 0.6, 0.0).unwrap(),
            BeamsplitterParams::balanced(),
        ])
        .unwrap();
        let a = m.amplitude(&"11".parse().unwrap()).unwrap();
        // 0.8 · (i/√2)
        assert!((a - Complex64::new(0.0, 0.8 * FRAC_1_SQRT_2)).norm() < TOLERANCE);
    }

    #[test]
    fn length_mismatch_is_a_contract_violation() {
        let m = HopperModel::ideal();
        assert!(matches!(
            m.amplitude(&"011".parse().unwrap()),
            Err(HistoryError::LengthMismatch {
                expected: 2,
                found: 3
            })
        ));
        assert!(m.measure(&ev(&["0"])).is_err());
        assert!(m.measure_oracle(&ev(&["0"])).is_err());
    }

    #[test]
    fn ideal_measures() {
        let m = HopperModel::ideal();
        let mu = |items: &[&str]| m.measure(&ev(items)).unwrap();
        assert!((mu(&["00", "01", "11"]) - 1.25).abs() < TOLERANCE);
        assert!((mu(&["00"]) - 0.25).abs() < TOLERANCE);
        assert!((mu(&["01", "11"]) - 1.0).abs() < TOLERANCE);
        assert!((mu(&["00", "01", "10", "11"]) - 1.0).abs() < TOLERANCE);
        assert_eq!(m.measure(&Event::empty()).unwrap(), 0.0);
        assert_eq!(m.measure_oracle(&Event::empty()).unwrap(), 0.0);
        assert!((m.measure_oracle(&ev(&["00", "01", "11"])).unwrap() - 1.25).abs() < TOLERANCE);
    }

    #[test]
    fn role_table_switches_convention() {
        let m = HopperModel::ideal()
            .with_role_table(vec![StepRole::ReflectSwitches; 2])
            .unwrap();
        let a = |s: &str| m.amplitude(&s.parse().unwrap()).unwrap();
        assert!((a("00") - Complex64::new(0.5, 0.0)).norm() < TOLERANCE);
        assert!((a("10") - Complex64::new(-0.5, 0.0)).norm() < TOLERANCE);
        assert!(HopperModel::ideal()
            .with_role_table(vec![StepRole::ReflectKeeps])
            .is_err());
    }

    #[test]
    fn serial_examples() {
        let space = HistorySpace::new(2).unwrap();
        assert!(is_serial(&ev(&["00", "10"]), &space).unwrap());
        assert!(!is_serial(&ev(&["00", "11"]), &space).unwrap());
        assert!(is_serial(&space.full_event(), &space).unwrap());
        assert!(is_serial(&ev(&["01"]), &space).unwrap());
        assert!(!is_serial(&ev(&["00", "01", "11"]), &space).unwrap());
    }

    #[test]
    fn complement_and_sum_rule_violation() {
        let m = HopperModel::ideal();
        let space = m.history_space().unwrap();
        let e = ev(&["00", "01", "11"]);
        let c = e.complement(&space).unwrap();
        assert_eq!(c.to_string(), "{10}");
        let total = m.measure(&e).unwrap() + m.measure(&c).unwrap();
        assert!((total - 1.5).abs() < TOLERANCE);
    }

    #[test]
    fn model_json_round_trip() {
        let json = r#"{"steps":[{"t":0.6,"r":0.8,"phi":1.0},{"t":1.0,"r":0.0,"phi":0.0}],
                       "role_table":["reflect_keeps","reflect_switches"]}"#;
        let m: HopperModel = serde_json::from_str(json).unwrap();
        assert_eq!(m.role(1), StepRole::ReflectSwitches);
        let back: HopperModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"steps":[{"t":0.6,"r":0.6,"phi":0.0}]}"#;
        assert!(serde_json::from_str::<HopperModel>(bad).is_err());
        assert!(serde_json::from_str::<HopperModel>(r#"{"steps":[]}"#).is_err());
    }
}
