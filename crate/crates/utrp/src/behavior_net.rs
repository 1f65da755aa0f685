//! Behavior nets: Petri nets that replay exactly the realizations of an
//! uncertain trace, plus the weighted stochastic simulator and the
//! generative Monte Carlo oracle.
//!
//! Construction: one place per behavior-graph edge, a source place feeding
//! the `≺`-minimal events and a sink place fed by the `≺`-maximal events.
//! When several events are minimal (or maximal), a silent fan-out (fan-in)
//! transition distributes the single source token so concurrent minimal
//! events do not compete for it; with a unique minimal event the source
//! feeds it directly, as in the single-entry nets of the literature.
//!
//! Reproducibility: simulation uses ChaCha8 seeded with the report seed,
//! with ChaCha stream id = run index, so runs are independent substreams
//! and reports are bit-stable for a given `(n, seed)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::core_model::{ActivityLabel, EventId, TimestampSpec, UncertainTrace, SILENT_LABEL};
use crate::error::{Error, Result};
use crate::partial_order::{BehaviorGraph, Realization};
use crate::petri::{PetriNet, Transition, TransitionId};

/// A behavior net with its event mapping and transition weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorNet {
    pub net: PetriNet,
    /// Event and label per event transition; label `None` is the skip (ε).
    /// Structural fan transitions are absent from this map.
    pub event_of: BTreeMap<TransitionId, (EventId, Option<ActivityLabel>)>,
    pub weights: BTreeMap<TransitionId, f64>,
}

/// Outcome of `n` stochastic runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n_runs: u64,
    pub seed: u64,
    /// Distinct realizations, sorted.
    pub sequences: Vec<Realization>,
    /// Fraction of runs per realization; sums to 1.
    pub frequencies: Vec<f64>,
    /// Index into `sequences` per run, enabling convergence series.
    pub run_outcomes: Vec<u32>,
}

impl SimulationReport {
    fn from_runs(n: u64, seed: u64, runs: Vec<Realization>) -> SimulationReport {
        let mut sequences: Vec<Realization> = runs.to_vec();
        sequences.sort();
        sequences.dedup();
        let index: BTreeMap<&Realization, u32> =
            sequences.iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
        let run_outcomes: Vec<u32> = runs.iter().map(|r| index[r]).collect();
        let mut counts = vec![0u64; sequences.len()];
        for &i in &run_outcomes {
            counts[i as usize] += 1;
        }
        let frequencies = counts.iter().map(|&c| c as f64 / n as f64).collect();
        SimulationReport { n_runs: n, seed, sequences, frequencies, run_outcomes }
    }

    pub fn frequency_of(&self, sigma: &Realization) -> f64 {
        self.sequences
            .iter()
            .position(|s| s == sigma)
            .map(|i| self.frequencies[i])
            .unwrap_or(0.0)
    }

    /// Running frequency of one realization after each run.
    pub fn convergence(&self, sequence_index: usize) -> Vec<(u64, f64)> {
        let mut hits = 0u64;
        self.run_outcomes
            .iter()
            .enumerate()
            .map(|(run, &i)| {
                if i as usize == sequence_index {
                    hits += 1;
                }
                (run as u64 + 1, hits as f64 / (run + 1) as f64)
            })
            .collect()
    }
}

fn edge_place(u: &str, v: &str) -> String {
    format!("p__{u}__{v}")
}

/// Builds the behavior net of a trace from its behavior graph. Weights are
/// not assigned; see [`assign_weights`].
pub fn construct_behavior_net(trace: &UncertainTrace, graph: &BehaviorGraph) -> Result<BehaviorNet> {
    let minimal = graph.minimal_events();
    let maximal = graph.maximal_events();

    let mut places = vec!["source".to_string(), "sink".to_string()];
    let mut transitions: Vec<Transition> = Vec::new();
    let mut arcs: Vec<(String, String)> = Vec::new();
    let mut event_of = BTreeMap::new();

    for (u, v) in &graph.edges {
        places.push(edge_place(u, v));
    }

    // token entry: direct when a single minimal event, silent fan-out otherwise
    let entry_place = |e: &str| -> String {
        if minimal.len() == 1 {
            "source".to_string()
        } else {
            format!("init__{e}")
        }
    };
    if minimal.len() > 1 {
        transitions.push(Transition { id: "t__fanout".into(), label: None });
        arcs.push(("source".into(), "t__fanout".into()));
        for e in &minimal {
            places.push(format!("init__{e}"));
            arcs.push(("t__fanout".into(), format!("init__{e}")));
        }
    }
    let exit_place = |e: &str| -> String {
        if maximal.len() == 1 {
            "sink".to_string()
        } else {
            format!("fin__{e}")
        }
    };
    if maximal.len() > 1 {
        transitions.push(Transition { id: "t__fanin".into(), label: None });
        arcs.push(("t__fanin".into(), "sink".into()));
        for e in &maximal {
            places.push(format!("fin__{e}"));
            arcs.push((format!("fin__{e}"), "t__fanin".into()));
        }
    }

    for event in &trace.events {
        let e = event.id.as_str();
        let mut inputs: Vec<String> =
            graph.predecessors(e).iter().map(|u| edge_place(u, e)).collect();
        if minimal.contains(&event.id) {
            inputs.push(entry_place(e));
        }
        let mut outputs: Vec<String> =
            graph.successors(e).iter().map(|v| edge_place(e, v)).collect();
        if maximal.contains(&event.id) {
            outputs.push(exit_place(e));
        }

        let mut variants: Vec<(TransitionId, Option<ActivityLabel>)> = event
            .label_set()
            .into_iter()
            .map(|a| (format!("t__{e}__{a}"), Some(a)))
            .collect();
        if event.is_indeterminate() {
            variants.push((format!("t__{e}__skip"), None));
        }
        for (id, label) in variants {
            for p in &inputs {
                arcs.push((p.clone(), id.clone()));
            }
            for p in &outputs {
                arcs.push((id.clone(), p.clone()));
            }
            event_of.insert(id.clone(), (event.id.clone(), label.clone()));
            transitions.push(Transition { id, label });
        }
    }

    let net = PetriNet {
        places,
        transitions,
        arcs,
        initial: [("source".to_string(), 1)].into_iter().collect(),
        final_marking: [("sink".to_string(), 1)].into_iter().collect(),
    };
    net.validate()?;
    Ok(BehaviorNet { net, event_of, weights: BTreeMap::new() })
}

/// Assigns the stochastic weights: `f_A(a)` for determinate events,
/// `(1 - f_O(?)) · f_A(a)` for indeterminate ones, and `f_O(?)` on the skip
/// transition. Structural fan transitions weigh 1.
pub fn assign_weights(bnet: &BehaviorNet, trace: &UncertainTrace) -> Result<BehaviorNet> {
    let mut weights = BTreeMap::new();
    for t in &bnet.net.transitions {
        let w = match bnet.event_of.get(&t.id) {
            None => 1.0,
            Some((event_id, label)) => {
                let event = trace
                    .event(event_id)
                    .ok_or_else(|| Error::Validation(format!("unknown event id {event_id}")))?;
                let skip = event.skip_probability()?;
                match label {
                    None => skip,
                    Some(a) => (1.0 - skip) * event.label_probability(a)?,
                }
            }
        };
        weights.insert(t.id.clone(), w);
    }
    Ok(BehaviorNet { net: bnet.net.clone(), event_of: bnet.event_of.clone(), weights })
}

/// Runs the weighted simulator `n` times. Each step samples one enabled
/// transition with probability proportional to its weight.
pub fn simulate(bnet: &BehaviorNet, n: u64, seed: u64) -> Result<SimulationReport> {
    assert!(n >= 1, "need at least one run");
    let compiled = bnet.net.compile();
    let weights: Vec<f64> = bnet
        .net
        .transitions
        .iter()
        .map(|t| bnet.weights.get(&t.id).copied().unwrap_or(1.0))
        .collect();
    let final_m = compiled.final_marking();

    let mut runs = Vec::with_capacity(n as usize);
    for run in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run);
        let mut marking = compiled.initial_marking();
        let mut labels: Vec<ActivityLabel> = Vec::new();
        loop {
            let enabled = compiled.enabled_transitions(&marking);
            if enabled.is_empty() {
                if marking == final_m {
                    break;
                }
                return Err(Error::Deadlock);
            }
            let total: f64 = enabled.iter().map(|&t| weights[t]).sum();
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = enabled[enabled.len() - 1];
            for &t in &enabled {
                target -= weights[t];
                if target <= 0.0 {
                    chosen = t;
                    break;
                }
            }
            if let Some(label) = &bnet.net.transitions[chosen].label {
                labels.push(label.clone());
            }
            marking = compiled.fire(&marking, chosen)?;
        }
        runs.push(Realization { labels });
    }
    Ok(SimulationReport::from_runs(n, seed, runs))
}

/// The generative oracle: samples each event's skip, label, and timestamp
/// from its own distributions, sorts by sampled time, and emits labels.
/// This realizes the data model directly and is independent of both the
/// analytic integrals and the behavior-net simulator.
pub fn generative_sample(trace: &UncertainTrace, n: u64, seed: u64) -> Result<SimulationReport> {
    assert!(n >= 1, "need at least one run");
    for e in &trace.events {
        if !e.is_normalized() {
            return Err(Error::NotNormalized(e.id.clone()));
        }
    }
    let mut runs = Vec::with_capacity(n as usize);
    for run in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run);
        // (time, tiebreak, label); the random tiebreak orders exact point
        // ties uniformly, matching the k!-split of the analytic path
        let mut sampled: Vec<(f64, u64, ActivityLabel)> = Vec::new();
        for e in &trace.events {
            if e.is_indeterminate() && rng.gen::<f64>() < e.skip_probability()? {
                continue;
            }
            let t = match &e.timestamp {
                TimestampSpec::Point(t) => *t,
                TimestampSpec::StrongInterval { lo, hi } if lo == hi => *lo,
                TimestampSpec::StrongInterval { .. } => unreachable!("checked normalized"),
                TimestampSpec::WeakDensity(d) => d.sample(&mut rng),
            };
            let label = sample_label(e, &mut rng)?;
            sampled.push((t, rng.gen::<u64>(), label));
        }
        sampled.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        runs.push(Realization { labels: sampled.into_iter().map(|(_, _, l)| l).collect() });
    }
    Ok(SimulationReport::from_runs(n, seed, runs))
}

fn sample_label<R: Rng>(e: &crate::core_model::UncertainEvent, rng: &mut R) -> Result<ActivityLabel> {
    match &e.activity {
        crate::core_model::ActivitySpec::Certain(a) => Ok(a.clone()),
        crate::core_model::ActivitySpec::WeakDist(d) => {
            let total: f64 = d.values().sum();
            let mut target = rng.gen::<f64>() * total;
            let mut last = None;
            for (a, &p) in d {
                target -= p;
                last = Some(a);
                if target <= 0.0 {
                    return Ok(a.clone());
                }
            }
            Ok(last.expect("non-empty pmf").clone())
        }
        crate::core_model::ActivitySpec::StrongSet(_) => Err(Error::NotNormalized(e.id.clone())),
    }
}

/// Rendering of a transition label in reports: skip transitions show as ε.
pub fn display_label(label: &Option<ActivityLabel>) -> &str {
    label.as_deref().unwrap_or(SILENT_LABEL)
}
