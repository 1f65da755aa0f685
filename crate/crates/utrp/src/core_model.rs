//! Uncertain event data model: activities, timestamps, and indeterminacy,
//! each either certain, strongly uncertain (set / interval, no probabilities)
//! or weakly uncertain (explicit distribution).
//!
//! Timestamps are real-valued seconds since the Unix epoch. All types are
//! immutable after construction and safe to share across workers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::density::PiecewiseDensity;
use crate::error::{Error, Result};

pub type ActivityLabel = String;
pub type EventId = String;
pub type CaseId = String;
pub type RealTime = f64;

/// Reserved rendering of silent transitions; rejected as an input label.
pub const SILENT_LABEL: &str = "ε";

/// Activity attribute of an uncertain event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ActivitySpec {
    Certain(ActivityLabel),
    /// Strong uncertainty: possible labels without probabilities. Non-empty.
    StrongSet(BTreeSet<ActivityLabel>),
    /// Weak uncertainty: label pmf with values in (0,1] summing to 1.
    WeakDist(BTreeMap<ActivityLabel, f64>),
}

/// Timestamp attribute of an uncertain event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TimestampSpec {
    Point(RealTime),
    /// Strong uncertainty: the closed interval `[lo, hi]`, `lo <= hi`.
    StrongInterval { lo: RealTime, hi: RealTime },
    /// Weak uncertainty: a normalized density over the support.
    WeakDensity(PiecewiseDensity),
}

/// Indeterminacy attribute: whether the event may not have occurred at all.
///
/// `p_skip = None` is the strong form `{?}` (indeterminate, probability
/// unknown); normalization resolves it to 0.5. The determinate shorthand
/// `f_O(?) = 1` is applied inside the order-probability formula, not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IndeterminacySpec {
    Determinate,
    Indeterminate { p_skip: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainEvent {
    pub id: EventId,
    pub case: CaseId,
    pub activity: ActivitySpec,
    pub timestamp: TimestampSpec,
    pub indeterminacy: IndeterminacySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainTrace {
    pub case: CaseId,
    /// Kept sorted by event id for deterministic iteration.
    pub events: Vec<UncertainEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainLog {
    pub traces: Vec<UncertainTrace>,
}

impl UncertainEvent {
    /// `π_a^set`: the labels with nonzero probability or possibility.
    pub fn label_set(&self) -> BTreeSet<ActivityLabel> {
        match &self.activity {
            ActivitySpec::Certain(a) => std::iter::once(a.clone()).collect(),
            ActivitySpec::StrongSet(s) => s.clone(),
            ActivitySpec::WeakDist(d) => d.keys().cloned().collect(),
        }
    }

    /// `(π_t_min, π_t_max)`: support endpoints of the timestamp.
    pub fn time_bounds(&self) -> (RealTime, RealTime) {
        match &self.timestamp {
            TimestampSpec::Point(t) => (*t, *t),
            TimestampSpec::StrongInterval { lo, hi } => (*lo, *hi),
            TimestampSpec::WeakDensity(d) => d.support(),
        }
    }

    /// `f_A(a)` for a normalized event.
    pub fn label_probability(&self, a: &str) -> Result<f64> {
        match &self.activity {
            ActivitySpec::Certain(l) => Ok(if l == a { 1.0 } else { 0.0 }),
            ActivitySpec::WeakDist(d) => Ok(d.get(a).copied().unwrap_or(0.0)),
            ActivitySpec::StrongSet(_) => Err(Error::NotNormalized(self.id.clone())),
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self.indeterminacy, IndeterminacySpec::Indeterminate { .. })
    }

    /// `f_O(?)` for a normalized event; 0 for determinate events.
    pub fn skip_probability(&self) -> Result<f64> {
        match &self.indeterminacy {
            IndeterminacySpec::Determinate => Ok(0.0),
            IndeterminacySpec::Indeterminate { p_skip: Some(p) } => Ok(*p),
            IndeterminacySpec::Indeterminate { p_skip: None } => {
                Err(Error::NotNormalized(self.id.clone()))
            }
        }
    }

    /// True when every attribute is certain or weakly uncertain.
    pub fn is_normalized(&self) -> bool {
        !matches!(self.activity, ActivitySpec::StrongSet(_))
            && !matches!(self.timestamp, TimestampSpec::StrongInterval { lo, hi } if lo < hi)
            && !matches!(
                self.indeterminacy,
                IndeterminacySpec::Indeterminate { p_skip: None }
            )
    }

    /// The strong-to-weak uniformity transform: sets become uniform pmfs,
    /// intervals become uniform densities, unspecified indeterminacy becomes
    /// skip probability 0.5. Idempotent; preserves `label_set` and
    /// `time_bounds` exactly.
    pub fn normalize_strong(&self) -> UncertainEvent {
        let activity = match &self.activity {
            ActivitySpec::StrongSet(s) => {
                let p = 1.0 / s.len() as f64;
                ActivitySpec::WeakDist(s.iter().map(|a| (a.clone(), p)).collect())
            }
            other => other.clone(),
        };
        let timestamp = match &self.timestamp {
            TimestampSpec::StrongInterval { lo, hi } if lo < hi => {
                TimestampSpec::WeakDensity(
                    PiecewiseDensity::uniform(*lo, *hi)
                        .expect("validated interval yields a uniform density"),
                )
            }
            TimestampSpec::StrongInterval { lo, .. } => TimestampSpec::Point(*lo),
            other => other.clone(),
        };
        let indeterminacy = match &self.indeterminacy {
            IndeterminacySpec::Indeterminate { p_skip: None } => {
                IndeterminacySpec::Indeterminate { p_skip: Some(0.5) }
            }
            other => other.clone(),
        };
        UncertainEvent {
            id: self.id.clone(),
            case: self.case.clone(),
            activity,
            timestamp,
            indeterminacy,
        }
    }

    /// Structural validation of the per-event invariants.
    pub fn validate(&self) -> Result<()> {
        match &self.activity {
            ActivitySpec::Certain(a) => {
                if a.is_empty() || a == SILENT_LABEL {
                    return Err(Error::Validation(format!(
                        "event {}: invalid activity label {a:?}",
                        self.id
                    )));
                }
            }
            ActivitySpec::StrongSet(s) => {
                if s.is_empty() {
                    return Err(Error::Validation(format!(
                        "event {}: empty strong activity set",
                        self.id
                    )));
                }
                if s.contains(SILENT_LABEL) {
                    return Err(Error::Validation(format!(
                        "event {}: label {SILENT_LABEL:?} is reserved",
                        self.id
                    )));
                }
            }
            ActivitySpec::WeakDist(d) => {
                if d.is_empty() {
                    return Err(Error::Validation(format!(
                        "event {}: empty activity distribution",
                        self.id
                    )));
                }
                let sum: f64 = d.values().sum();
                for (a, &p) in d {
                    if a == SILENT_LABEL {
                        return Err(Error::Validation(format!(
                            "event {}: label {SILENT_LABEL:?} is reserved",
                            self.id
                        )));
                    }
                    if !(p > 0.0 && p <= 1.0 + 1e-9) {
                        return Err(Error::Validation(format!(
                            "event {}: label probability {p} out of (0,1]",
                            self.id
                        )));
                    }
                }
                if !(sum > 0.0 && sum <= 1.0 + 1e-9) {
                    return Err(Error::Validation(format!(
                        "event {}: activity pmf sums to {sum}",
                        self.id
                    )));
                }
            }
        }
        match &self.timestamp {
            TimestampSpec::Point(t) => {
                if !t.is_finite() {
                    return Err(Error::Validation(format!(
                        "event {}: non-finite timestamp",
                        self.id
                    )));
                }
            }
            TimestampSpec::StrongInterval { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::Validation(format!(
                        "event {}: invalid timestamp interval [{lo}, {hi}]",
                        self.id
                    )));
                }
            }
            TimestampSpec::WeakDensity(d) => {
                let mass = d.total_mass();
                if (mass - 1.0).abs() > 1e-9 {
                    return Err(Error::Validation(format!(
                        "event {}: timestamp density mass {mass}",
                        self.id
                    )));
                }
            }
        }
        if let IndeterminacySpec::Indeterminate { p_skip: Some(p) } = &self.indeterminacy {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(Error::Validation(format!(
                    "event {}: skip probability {p} out of (0,1]",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

impl UncertainTrace {
    pub fn new(case: CaseId, mut events: Vec<UncertainEvent>) -> Result<Self> {
        events.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = BTreeSet::new();
        for e in &events {
            if e.case != case {
                return Err(Error::Validation(format!(
                    "event {} belongs to case {}, expected {case}",
                    e.id, e.case
                )));
            }
            if !seen.insert(e.id.clone()) {
                return Err(Error::Validation(format!("duplicate event id {}", e.id)));
            }
            e.validate()?;
        }
        Ok(UncertainTrace { case, events })
    }

    pub fn event(&self, id: &str) -> Option<&UncertainEvent> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn is_normalized(&self) -> bool {
        self.events.iter().all(|e| e.is_normalized())
    }

    pub fn normalize_strong(&self) -> UncertainTrace {
        UncertainTrace {
            case: self.case.clone(),
            events: self.events.iter().map(|e| e.normalize_strong()).collect(),
        }
    }
}

impl UncertainLog {
    pub fn new(traces: Vec<UncertainTrace>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for t in &traces {
            for e in &t.events {
                if !seen.insert(e.id.clone()) {
                    return Err(Error::Validation(format!(
                        "event id {} is not globally unique",
                        e.id
                    )));
                }
            }
        }
        Ok(UncertainLog { traces })
    }

    pub fn trace(&self, case: &str) -> Option<&UncertainTrace> {
        self.traces.iter().find(|t| t.case == case)
    }

    pub fn normalize_strong(&self) -> UncertainLog {
        UncertainLog {
            traces: self.traces.iter().map(|t| t.normalize_strong()).collect(),
        }
    }
}
