//! File formats and report emitters: the JSON log/model documents, DOT
//! exports, CSV tables, and the hand-rolled SVG convergence plot.
//!
//! Log document layout:
//! `{"traces": [{"case": "...", "events": [EventRecord...]}]}` where an
//! `EventRecord` is `{"id", "activity", "timestamp", "indeterminate"?}`.
//! Activity is a bare label, `{"set": [..]}`, or `{"dist": {label: p}}`.
//! Timestamp is an ISO-8601 string, `{"interval": [iso, iso]}`,
//! `{"uniform": [iso, iso]}`, or `{"pieces": [{"from", "to", "coeffs"}]}`.
//! A bare ISO date (no time component) denotes the full-day interval.
//! Piece `coeffs` are ascending polynomial coefficients over the
//! normalized coordinate `u = (t - from) / (to - from) ∈ [0, 1)`, so
//! user-supplied shapes are independent of the epoch scale; a piece's
//! mass is `∫₀¹ p(u) du`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::behavior_net::{display_label, BehaviorNet, SimulationReport};
use crate::core_model::{
    ActivitySpec, IndeterminacySpec, TimestampSpec, UncertainEvent, UncertainLog, UncertainTrace,
};
use crate::density::{Piece, PiecewiseDensity, Poly};
use crate::error::{Error, Result};
use crate::partial_order::{BehaviorGraph, Realization};
use crate::petri::PetriNet;
use crate::probability::RealizationDistribution;

/// Timestamp densities whose mass deviates from 1 beyond this are rejected;
/// smaller deviations are renormalized with a warning.
pub const DENSITY_MASS_GATE: f64 = 1e-6;

// ---------------------------------------------------------------------------
// document types

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogDocument {
    pub traces: Vec<TraceDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDocument {
    pub case: String,
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: String,
    pub activity: ActivityField,
    pub timestamp: TimestampField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indeterminate: Option<IndeterminacyField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActivityField {
    Label(String),
    Set { set: Vec<String> },
    Dist { dist: BTreeMap<String, f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimestampField {
    Iso(String),
    Interval { interval: [String; 2] },
    Uniform { uniform: [String; 2] },
    Pieces { pieces: Vec<PieceRecord> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceRecord {
    pub from: String,
    pub to: String,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndeterminacyField {
    Flag(bool),
    Prob { prob: f64 },
}

/// A parsed, validated, normalized log plus loader warnings.
#[derive(Debug, Clone)]
pub struct ParsedLog {
    pub log: UncertainLog,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// time handling

enum TimeValue {
    Instant(f64),
    /// A bare date: the full day `[start, end)`.
    Day { start: f64, end: f64 },
}

fn parse_instant(s: &str) -> Option<f64> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp() as f64 + dt.timestamp_subsec_nanos() as f64 * 1e-9);
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(ndt) = NaiveDateTime::parse_from_str(s, fmt) {
            let dt = ndt.and_utc();
            return Some(dt.timestamp() as f64 + dt.timestamp_subsec_nanos() as f64 * 1e-9);
        }
    }
    None
}

fn parse_time_value(s: &str) -> Result<TimeValue> {
    if let Some(t) = parse_instant(s) {
        return Ok(TimeValue::Instant(t));
    }
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        let start = date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp();
        return Ok(TimeValue::Day { start: start as f64, end: (start + 86_400) as f64 });
    }
    Err(Error::Parse(format!("unrecognized timestamp {s:?}")))
}

/// Left endpoint semantics: a bare date starts at 00:00.
fn time_start(v: &TimeValue) -> f64 {
    match v {
        TimeValue::Instant(t) => *t,
        TimeValue::Day { start, .. } => *start,
    }
}

/// Right endpoint semantics: a bare date extends to the next midnight.
fn time_end(v: &TimeValue) -> f64 {
    match v {
        TimeValue::Instant(t) => *t,
        TimeValue::Day { end, .. } => *end,
    }
}

/// Renders an epoch-seconds time as ISO-8601 UTC.
pub fn format_time(t: f64) -> String {
    let mut secs = t.floor() as i64;
    let mut nanos = ((t - secs as f64) * 1e9).round() as i64;
    if nanos >= 1_000_000_000 {
        secs += 1;
        nanos = 0;
    }
    let dt = DateTime::<Utc>::from_timestamp(secs, nanos as u32)
        .expect("timestamp within chrono range");
    if nanos == 0 {
        dt.format("%Y-%m-%dT%H:%M:%SZ").to_string()
    } else {
        dt.format("%Y-%m-%dT%H:%M:%S%.6fZ").to_string()
    }
}

// ---------------------------------------------------------------------------
// log parsing

fn convert_activity(
    rec: &EventRecord,
    ctx: &str,
    warnings: &mut Vec<String>,
) -> Result<ActivitySpec> {
    match &rec.activity {
        ActivityField::Label(a) => Ok(ActivitySpec::Certain(a.clone())),
        ActivityField::Set { set } => {
            if set.is_empty() {
                return Err(Error::Validation(format!("{ctx}: empty activity set")));
            }
            Ok(ActivitySpec::StrongSet(set.iter().cloned().collect()))
        }
        ActivityField::Dist { dist } => {
            if dist.is_empty() {
                return Err(Error::Validation(format!("{ctx}: empty activity distribution")));
            }
            for (a, &p) in dist {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::Validation(format!(
                        "{ctx}: activity probability {p} for {a:?} outside (0, 1]"
                    )));
                }
            }
            let sum: f64 = dist.values().sum();
            if sum > 1.0 + 1e-9 {
                return Err(Error::Validation(format!(
                    "{ctx}: activity probabilities sum to {sum} > 1"
                )));
            }
            let mut dist = dist.clone();
            if (sum - 1.0).abs() > 1e-9 {
                warnings.push(format!(
                    "{ctx}: activity probabilities sum to {sum}; renormalized to 1"
                ));
                for p in dist.values_mut() {
                    *p /= sum;
                }
            }
            Ok(ActivitySpec::WeakDist(dist))
        }
    }
}

/// A document piece is already in the library's local-coordinate
/// convention: `coeffs` define `p(u)` with `f(t) = p(u) / span`.
fn piece_from_record(from: f64, to: f64, coeffs: &[f64]) -> Result<Piece> {
    if !(from < to) {
        return Err(Error::Validation(format!(
            "piece endpoints not increasing: {from} >= {to}"
        )));
    }
    Ok(Piece { lo: from, hi: to, poly: Poly(coeffs.to_vec()) })
}

fn convert_timestamp(
    rec: &EventRecord,
    ctx: &str,
    warnings: &mut Vec<String>,
) -> Result<TimestampSpec> {
    match &rec.timestamp {
        TimestampField::Iso(s) => match parse_time_value(s)? {
            TimeValue::Instant(t) => Ok(TimestampSpec::Point(t)),
            TimeValue::Day { start, end } => {
                Ok(TimestampSpec::StrongInterval { lo: start, hi: end })
            }
        },
        TimestampField::Interval { interval } => {
            let lo = time_start(&parse_time_value(&interval[0])?);
            let hi = time_end(&parse_time_value(&interval[1])?);
            if lo > hi {
                return Err(Error::Validation(format!(
                    "{ctx}: interval endpoints out of order"
                )));
            }
            Ok(TimestampSpec::StrongInterval { lo, hi })
        }
        TimestampField::Uniform { uniform } => {
            let lo = time_start(&parse_time_value(&uniform[0])?);
            let hi = time_end(&parse_time_value(&uniform[1])?);
            Ok(TimestampSpec::WeakDensity(PiecewiseDensity::uniform(lo, hi)?))
        }
        TimestampField::Pieces { pieces } => {
            let mut abs = Vec::with_capacity(pieces.len());
            for p in pieces {
                let from = time_start(&parse_time_value(&p.from)?);
                let to = time_end(&parse_time_value(&p.to)?);
                abs.push(piece_from_record(from, to, &p.coeffs)?);
            }
            let d = PiecewiseDensity::new_unnormalized(abs)
                .map_err(|e| Error::Validation(format!("{ctx}: {e}")))?;
            let mass = d.total_mass();
            if (mass - 1.0).abs() > DENSITY_MASS_GATE {
                return Err(Error::Validation(format!(
                    "{ctx}: density mass {mass} deviates from 1 beyond {DENSITY_MASS_GATE}"
                )));
            }
            let d = if (mass - 1.0).abs() > 1e-9 {
                warnings.push(format!("{ctx}: density mass {mass}; renormalized to 1"));
                d.rescale_mass(1.0 / mass)
            } else {
                d
            };
            Ok(TimestampSpec::WeakDensity(d))
        }
    }
}

fn convert_indeterminacy(rec: &EventRecord, ctx: &str) -> Result<IndeterminacySpec> {
    match &rec.indeterminate {
        None | Some(IndeterminacyField::Flag(false)) => Ok(IndeterminacySpec::Determinate),
        Some(IndeterminacyField::Flag(true)) => {
            Ok(IndeterminacySpec::Indeterminate { p_skip: None })
        }
        Some(IndeterminacyField::Prob { prob }) => {
            if !(*prob > 0.0 && *prob < 1.0) {
                return Err(Error::Validation(format!(
                    "{ctx}: indeterminacy probability {prob} outside (0, 1)"
                )));
            }
            Ok(IndeterminacySpec::Indeterminate { p_skip: Some(*prob) })
        }
    }
}

/// Parses a log document from a JSON string: validates, applies
/// `normalize_strong`, and collects renormalization warnings.
pub fn parse_log_str(json: &str) -> Result<ParsedLog> {
    let doc: LogDocument =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("log document: {e}")))?;
    let mut warnings = Vec::new();
    let mut traces = Vec::with_capacity(doc.traces.len());
    for t in &doc.traces {
        let mut events = Vec::with_capacity(t.events.len());
        for rec in &t.events {
            let ctx = format!("case {:?} event {:?}", t.case, rec.id);
            let event = UncertainEvent {
                id: rec.id.clone(),
                case: t.case.clone(),
                activity: convert_activity(rec, &ctx, &mut warnings)?,
                timestamp: convert_timestamp(rec, &ctx, &mut warnings)?,
                indeterminacy: convert_indeterminacy(rec, &ctx)?,
            };
            event.validate().map_err(|e| Error::Validation(format!("{ctx}: {e}")))?;
            events.push(event);
        }
        traces.push(UncertainTrace::new(t.case.clone(), events)?);
    }
    let log = UncertainLog::new(traces)?.normalize_strong();
    Ok(ParsedLog { log, warnings })
}

pub fn parse_log(path: &Path) -> Result<ParsedLog> {
    let json = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_log_str(&json).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// log serialization

fn density_field(d: &PiecewiseDensity) -> TimestampField {
    let pieces = d.pieces();
    if pieces.len() == 1 && pieces[0].poly.degree() == 0 {
        return TimestampField::Uniform {
            uniform: [format_time(pieces[0].lo), format_time(pieces[0].hi)],
        };
    }
    TimestampField::Pieces {
        pieces: pieces
            .iter()
            .map(|p| PieceRecord {
                from: format_time(p.lo),
                to: format_time(p.hi),
                coeffs: p.poly.0.clone(),
            })
            .collect(),
    }
}

/// Serializes a log back to the document format; normalization-fixpoint
/// logs round-trip to an identical in-memory value.
pub fn log_to_document(log: &UncertainLog) -> LogDocument {
    let traces = log
        .traces
        .iter()
        .map(|t| TraceDocument {
            case: t.case.clone(),
            events: t
                .events
                .iter()
                .map(|e| EventRecord {
                    id: e.id.clone(),
                    activity: match &e.activity {
                        ActivitySpec::Certain(a) => ActivityField::Label(a.clone()),
                        ActivitySpec::StrongSet(s) => {
                            ActivityField::Set { set: s.iter().cloned().collect() }
                        }
                        ActivitySpec::WeakDist(d) => ActivityField::Dist { dist: d.clone() },
                    },
                    timestamp: match &e.timestamp {
                        TimestampSpec::Point(t) => TimestampField::Iso(format_time(*t)),
                        TimestampSpec::StrongInterval { lo, hi } => TimestampField::Interval {
                            interval: [format_time(*lo), format_time(*hi)],
                        },
                        TimestampSpec::WeakDensity(d) => density_field(d),
                    },
                    indeterminate: match &e.indeterminacy {
                        IndeterminacySpec::Determinate => None,
                        IndeterminacySpec::Indeterminate { p_skip: None } => {
                            Some(IndeterminacyField::Flag(true))
                        }
                        IndeterminacySpec::Indeterminate { p_skip: Some(p) } => {
                            Some(IndeterminacyField::Prob { prob: *p })
                        }
                    },
                })
                .collect(),
        })
        .collect();
    LogDocument { traces }
}

pub fn serialize_log(log: &UncertainLog) -> Result<String> {
    Ok(serde_json::to_string_pretty(&log_to_document(log))?)
}

// ---------------------------------------------------------------------------
// model parsing

pub fn parse_model_str(json: &str) -> Result<PetriNet> {
    let net: PetriNet =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("model document: {e}")))?;
    net.validate()?;
    Ok(net)
}

pub fn parse_model(path: &Path) -> Result<PetriNet> {
    let json = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_model_str(&json).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn serialize_model(net: &PetriNet) -> Result<String> {
    Ok(serde_json::to_string_pretty(net)?)
}

// ---------------------------------------------------------------------------
// DOT exports

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn behavior_graph_dot(graph: &BehaviorGraph, trace: &UncertainTrace) -> String {
    let mut out = String::from("digraph behavior_graph {\n  rankdir=LR;\n  node [shape=box];\n");
    for id in &graph.nodes {
        let label = match trace.event(id) {
            Some(e) => {
                let labels: Vec<_> = e.label_set().into_iter().collect();
                let mark = if e.is_indeterminate() { "?" } else { "" };
                format!("{}{mark}\\n{}", dot_escape(id), dot_escape(&labels.join("|")))
            }
            None => dot_escape(id),
        };
        let _ = writeln!(out, "  \"{}\" [label=\"{label}\"];", dot_escape(id));
    }
    for (u, v) in &graph.edges {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", dot_escape(u), dot_escape(v));
    }
    out.push_str("}\n");
    out
}

pub fn petri_net_dot(net: &PetriNet, weights: Option<&BTreeMap<String, f64>>) -> String {
    let mut out = String::from("digraph petri_net {\n  rankdir=LR;\n");
    for p in &net.places {
        let tokens = net.initial.get(p).copied().unwrap_or(0);
        let mut label = dot_escape(p);
        if tokens > 0 {
            let _ = write!(label, "\\n●{tokens}");
        }
        let _ = writeln!(out, "  \"{}\" [shape=circle, label=\"{label}\"];", dot_escape(p));
    }
    for t in &net.transitions {
        let mut label = match &t.label {
            Some(a) => dot_escape(a),
            None => "ε".to_string(),
        };
        if let Some(w) = weights.and_then(|w| w.get(&t.id)) {
            let _ = write!(label, "\\n{w:.3}");
        }
        let style = if t.label.is_none() { ", style=filled, fillcolor=gray80" } else { "" };
        let _ = writeln!(
            out,
            "  \"{}\" [shape=box, label=\"{label}\"{style}];",
            dot_escape(&t.id)
        );
    }
    for (from, to) in &net.arcs {
        let _ = writeln!(out, "  \"{}\" -> \"{}\";", dot_escape(from), dot_escape(to));
    }
    out.push_str("}\n");
    out
}

pub fn behavior_net_dot(bnet: &BehaviorNet) -> String {
    petri_net_dot(&bnet.net, Some(&bnet.weights))
}

// ---------------------------------------------------------------------------
// CSV emitters

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn sequence_cell(sigma: &Realization) -> String {
    csv_quote(&sigma.to_string())
}

/// `sequence, probability, order_realizations` (1-based ρ indices).
pub fn distribution_csv(dist: &RealizationDistribution, precision: usize) -> String {
    let mut out = String::from("sequence,probability,order_realizations\n");
    for (sigma, p) in &dist.by_sequence {
        let rhos: Vec<String> = dist
            .provenance
            .get(sigma)
            .map(|v| v.iter().map(|(i, _)| (i + 1).to_string()).collect())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.*},{}",
            sequence_cell(sigma),
            precision,
            p,
            csv_quote(&rhos.join(";"))
        );
    }
    out
}

/// `index, events, integral, probability` per order-realization.
pub fn order_realizations_csv(dist: &RealizationDistribution, precision: usize) -> String {
    let mut out = String::from("index,events,integral,probability\n");
    for (i, entry) in dist.by_order.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{:.*},{:.*}",
            i + 1,
            csv_quote(&entry.rho.events.join(";")),
            precision,
            entry.integral,
            precision,
            entry.probability
        );
    }
    out
}

/// `run_index, sequence` per simulation run.
pub fn runs_csv(report: &SimulationReport) -> String {
    let mut out = String::from("run_index,sequence\n");
    for (run, &i) in report.run_outcomes.iter().enumerate() {
        let _ = writeln!(out, "{},{}", run, sequence_cell(&report.sequences[i as usize]));
    }
    out
}

/// Running frequency per sequence after each run: `n, <seq1>, <seq2>, ...`.
pub fn convergence_csv(report: &SimulationReport) -> String {
    let mut out = String::from("n");
    for s in &report.sequences {
        let _ = write!(out, ",{}", sequence_cell(s));
    }
    out.push('\n');
    let series: Vec<Vec<(u64, f64)>> =
        (0..report.sequences.len()).map(|i| report.convergence(i)).collect();
    for run in 0..report.n_runs as usize {
        let _ = write!(out, "{}", run + 1);
        for s in &series {
            let _ = write!(out, ",{:.6}", s[run].1);
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// SVG convergence plot

const SVG_PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Running-frequency curves per realization, with optional dashed reference
/// lines at the analytic probabilities.
pub fn convergence_svg(
    report: &SimulationReport,
    analytic: Option<&BTreeMap<Realization, f64>>,
) -> String {
    let (w, h) = (860.0, 520.0);
    let (ml, mr, mt, mb) = (60.0, 220.0, 20.0, 45.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let n = report.n_runs as f64;

    let mut y_max: f64 = 0.0;
    for i in 0..report.sequences.len() {
        for (_, f) in report.convergence(i) {
            y_max = y_max.max(f);
        }
    }
    if let Some(a) = analytic {
        for &p in a.values() {
            y_max = y_max.max(p);
        }
    }
    let y_max = (y_max * 1.1).clamp(0.1, 1.0);

    let x_of = |run: f64| ml + pw * run / n;
    let y_of = |f: f64| mt + ph * (1.0 - f / y_max);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    );
    // axes
    let _ = writeln!(
        out,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        mt + ph,
        ml + pw,
        mt + ph
    );
    let _ = writeln!(
        out,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        mt + ph
    );
    for k in 0..=5 {
        let f = y_max * k as f64 / 5.0;
        let y = y_of(f);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{ml}\" y2=\"{y}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{f:.2}</text>",
            ml - 5.0,
            ml - 8.0,
            y + 4.0
        );
    }
    for k in 0..=4 {
        let run = n * k as f64 / 4.0;
        let x = x_of(run);
        let _ = writeln!(
            out,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>\
             <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 20.0,
            run as u64
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">runs</text>",
        ml + pw / 2.0,
        h - 8.0
    );

    for (i, sigma) in report.sequences.iter().enumerate() {
        let color = SVG_PALETTE[i % SVG_PALETTE.len()];
        if let Some(&p) = analytic.and_then(|a| a.get(sigma)) {
            let y = y_of(p);
            let _ = writeln!(
                out,
                "<line x1=\"{ml}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" \
                 stroke-dasharray=\"6,4\" opacity=\"0.6\"/>",
                ml + pw
            );
        }
        let series = report.convergence(i);
        let step = (series.len() / 2000).max(1);
        let mut points = String::new();
        for (run, f) in series.iter().step_by(step).chain(series.last()) {
            let _ = write!(points, "{:.1},{:.1} ", x_of(*run as f64), y_of(*f));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            points.trim_end()
        );
        // legend
        let ly = mt + 15.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/><text x=\"{}\" y=\"{}\">{} ({:.4})</text>",
            ml + pw + 10.0,
            ml + pw + 35.0,
            ml + pw + 40.0,
            ly + 4.0,
            xml_escape(&sigma.to_string()),
            report.frequencies[i]
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Simulation report sequences rendered with ε for empty traces (not
/// expected from behavior nets, but the generative oracle can emit them).
pub fn sequence_display(sigma: &Realization) -> String {
    if sigma.labels.is_empty() {
        format!("⟨{}⟩", display_label(&None))
    } else {
        sigma.to_string()
    }
}
