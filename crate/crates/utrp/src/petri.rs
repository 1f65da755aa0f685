//! Petri net semantics, optimal alignments, and probability-weighted
//! expected conformance.
//!
//! Alignments use the standard unit cost function: log-only and visible
//! model-only moves cost 1, synchronous and silent model moves cost 0. The
//! optimum is found by uniform-cost search over the synchronous product.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::core_model::ActivityLabel;
use crate::error::{Error, Result};
use crate::partial_order::Realization;
use crate::probability::RealizationDistribution;

pub type PlaceId = String;
pub type TransitionId = String;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub id: TransitionId,
    /// `None` marks a silent transition.
    pub label: Option<ActivityLabel>,
}

/// A labeled Petri net with initial and final markings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetriNet {
    pub places: Vec<PlaceId>,
    pub transitions: Vec<Transition>,
    /// Bipartite arcs, place→transition or transition→place. Duplicates act
    /// as arc weights.
    pub arcs: Vec<(String, String)>,
    pub initial: BTreeMap<PlaceId, u32>,
    #[serde(rename = "final")]
    pub final_marking: BTreeMap<PlaceId, u32>,
}

/// Multiset of tokens indexed like `PetriNet::places`.
pub type Marking = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Move {
    /// A trace label with no model counterpart. Cost 1.
    Log(ActivityLabel),
    /// A model transition with no trace counterpart. Cost 1 if visible.
    Model(TransitionId),
    /// A trace label matched with an equally labeled transition. Cost 0.
    Synchronous(ActivityLabel, TransitionId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub moves: Vec<Move>,
    pub cost: u64,
}

/// Index-compiled view of a net for firing and search.
pub struct CompiledNet<'a> {
    net: &'a PetriNet,
    place_index: HashMap<&'a str, usize>,
    /// Per transition: (input place index, multiplicity).
    pre: Vec<Vec<(usize, u32)>>,
    post: Vec<Vec<(usize, u32)>>,
}

impl PetriNet {
    pub fn validate(&self) -> Result<()> {
        let places: HashMap<&str, usize> =
            self.places.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        if places.len() != self.places.len() {
            return Err(Error::Validation("duplicate place ids".into()));
        }
        let transitions: HashMap<&str, usize> =
            self.transitions.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
        if transitions.len() != self.transitions.len() {
            return Err(Error::Validation("duplicate transition ids".into()));
        }
        let mut has_in = vec![false; self.transitions.len()];
        let mut has_out = vec![false; self.transitions.len()];
        for (from, to) in &self.arcs {
            match (
                places.contains_key(from.as_str()),
                transitions.contains_key(from.as_str()),
                places.contains_key(to.as_str()),
                transitions.contains_key(to.as_str()),
            ) {
                (true, _, _, true) => has_in[transitions[to.as_str()]] = true,
                (_, true, true, _) => has_out[transitions[from.as_str()]] = true,
                _ => {
                    return Err(Error::Validation(format!(
                        "arc ({from}, {to}) does not connect a place and a transition"
                    )))
                }
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if !has_in[i] || !has_out[i] {
                return Err(Error::Validation(format!(
                    "transition {} lacks an input or output arc",
                    t.id
                )));
            }
        }
        for marking in [&self.initial, &self.final_marking] {
            if marking.is_empty() {
                return Err(Error::Validation("empty marking".into()));
            }
            for p in marking.keys() {
                if !places.contains_key(p.as_str()) {
                    return Err(Error::Validation(format!("marking uses unknown place {p}")));
                }
            }
        }
        Ok(())
    }

    pub fn compile(&self) -> CompiledNet<'_> {
        let place_index: HashMap<&str, usize> =
            self.places.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let transition_index: HashMap<&str, usize> =
            self.transitions.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
        let mut pre: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); self.transitions.len()];
        let mut post: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); self.transitions.len()];
        for (from, to) in &self.arcs {
            if let (Some(&p), Some(&t)) =
                (place_index.get(from.as_str()), transition_index.get(to.as_str()))
            {
                *pre[t].entry(p).or_insert(0) += 1;
            } else if let (Some(&t), Some(&p)) =
                (transition_index.get(from.as_str()), place_index.get(to.as_str()))
            {
                *post[t].entry(p).or_insert(0) += 1;
            }
        }
        CompiledNet {
            net: self,
            place_index,
            pre: pre.into_iter().map(|m| m.into_iter().collect()).collect(),
            post: post.into_iter().map(|m| m.into_iter().collect()).collect(),
        }
    }
}

impl<'a> CompiledNet<'a> {
    pub fn net(&self) -> &'a PetriNet {
        self.net
    }

    pub fn marking_of(&self, tokens: &BTreeMap<PlaceId, u32>) -> Marking {
        let mut m = vec![0; self.net.places.len()];
        for (p, &c) in tokens {
            m[self.place_index[p.as_str()]] = c;
        }
        m
    }

    pub fn initial_marking(&self) -> Marking {
        self.marking_of(&self.net.initial)
    }

    pub fn final_marking(&self) -> Marking {
        self.marking_of(&self.net.final_marking)
    }

    pub fn is_enabled(&self, marking: &Marking, t: usize) -> bool {
        self.pre[t].iter().all(|&(p, w)| marking[p] >= w)
    }

    pub fn enabled_transitions(&self, marking: &Marking) -> Vec<usize> {
        (0..self.net.transitions.len())
            .filter(|&t| self.is_enabled(marking, t))
            .collect()
    }

    /// Standard firing rule: consume from inputs, produce to outputs.
    pub fn fire(&self, marking: &Marking, t: usize) -> Result<Marking> {
        if !self.is_enabled(marking, t) {
            return Err(Error::NotEnabled(self.net.transitions[t].id.clone()));
        }
        let mut next = marking.clone();
        for &(p, w) in &self.pre[t] {
            next[p] -= w;
        }
        for &(p, w) in &self.post[t] {
            next[p] += w;
        }
        Ok(next)
    }

    /// All visible label sequences of complete firing runs (initial to final
    /// marking). Intended for acyclic nets; `max_states` guards the search.
    pub fn visible_language(&self, max_states: usize) -> Result<std::collections::BTreeSet<Vec<ActivityLabel>>> {
        let mut out = std::collections::BTreeSet::new();
        let final_m = self.final_marking();
        let mut stack: Vec<(Marking, Vec<ActivityLabel>)> =
            vec![(self.initial_marking(), vec![])];
        let mut explored = 0usize;
        while let Some((m, seq)) = stack.pop() {
            explored += 1;
            if explored > max_states {
                return Err(Error::Validation(
                    "language exploration exceeded the state budget".into(),
                ));
            }
            if m == final_m {
                out.insert(seq.clone());
            }
            for t in self.enabled_transitions(&m) {
                let next = self.fire(&m, t).expect("enabled transition fires");
                let mut next_seq = seq.clone();
                if let Some(label) = &self.net.transitions[t].label {
                    next_seq.push(label.clone());
                }
                stack.push((next, next_seq));
            }
        }
        Ok(out)
    }
}

const ALIGNMENT_STATE_BUDGET: usize = 5_000_000;

/// Minimal-cost alignment of an activity sequence against the net, by
/// Dijkstra over `(marking, trace position)` states.
pub fn optimal_alignment(sigma: &Realization, net: &PetriNet) -> Result<Alignment> {
    let compiled = net.compile();
    let initial = compiled.initial_marking();
    let final_m = compiled.final_marking();

    type State = (Marking, usize);
    let mut dist: HashMap<State, u64> = HashMap::new();
    let mut parent: HashMap<State, (State, Move)> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(u64, u64, State)>> = BinaryHeap::new();
    let start: State = (initial, 0);
    dist.insert(start.clone(), 0);
    let mut counter = 0u64;
    heap.push(Reverse((0, counter, start)));

    while let Some(Reverse((cost, _, state))) = heap.pop() {
        if dist.get(&state).copied().unwrap_or(u64::MAX) < cost {
            continue;
        }
        let (marking, pos) = &state;
        if *marking == final_m && *pos == sigma.labels.len() {
            let mut moves = Vec::new();
            let mut cur = state.clone();
            while let Some((prev, mv)) = parent.get(&cur) {
                moves.push(mv.clone());
                cur = prev.clone();
            }
            moves.reverse();
            return Ok(Alignment { moves, cost });
        }
        if dist.len() > ALIGNMENT_STATE_BUDGET {
            return Err(Error::Unalignable);
        }

        let mut push = |next: State, next_cost: u64, mv: Move,
                        dist: &mut HashMap<State, u64>,
                        parent: &mut HashMap<State, (State, Move)>,
                        heap: &mut BinaryHeap<Reverse<(u64, u64, State)>>| {
            if next_cost < dist.get(&next).copied().unwrap_or(u64::MAX) {
                dist.insert(next.clone(), next_cost);
                parent.insert(next.clone(), (state.clone(), mv));
                counter += 1;
                heap.push(Reverse((next_cost, counter, next)));
            }
        };

        // log move
        if *pos < sigma.labels.len() {
            push(
                (marking.clone(), pos + 1),
                cost + 1,
                Move::Log(sigma.labels[*pos].clone()),
                &mut dist,
                &mut parent,
                &mut heap,
            );
        }
        for t in compiled.enabled_transitions(marking) {
            let fired = compiled.fire(marking, t).expect("enabled transition fires");
            let label = &net.transitions[t].label;
            // model move: silent transitions are free
            let model_cost = if label.is_some() { 1 } else { 0 };
            push(
                (fired.clone(), *pos),
                cost + model_cost,
                Move::Model(net.transitions[t].id.clone()),
                &mut dist,
                &mut parent,
                &mut heap,
            );
            // synchronous move
            if let Some(l) = label {
                if *pos < sigma.labels.len() && sigma.labels[*pos] == *l {
                    push(
                        (fired, pos + 1),
                        cost,
                        Move::Synchronous(l.clone(), net.transitions[t].id.clone()),
                        &mut dist,
                        &mut parent,
                        &mut heap,
                    );
                }
            }
        }
    }
    Err(Error::Unalignable)
}

pub fn optimal_alignment_cost(sigma: &Realization, net: &PetriNet) -> Result<u64> {
    optimal_alignment(sigma, net).map(|a| a.cost)
}

/// Expected, best, worst, and unweighted-mean conformance of a distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub expected: f64,
    pub min: f64,
    pub max: f64,
    pub unweighted_mean: f64,
    /// `(sequence, probability, alignment cost)` rows, deterministic order.
    pub per_realization: Vec<(Realization, f64, f64)>,
}

impl ConformanceReport {
    /// Summary from precomputed `(sequence, probability, cost)` rows.
    pub fn from_scored(rows: Vec<(Realization, f64, f64)>) -> ConformanceReport {
        let expected = rows.iter().map(|(_, p, c)| p * c).sum();
        let min = rows.iter().map(|(_, _, c)| *c).fold(f64::INFINITY, f64::min);
        let max = rows.iter().map(|(_, _, c)| *c).fold(f64::NEG_INFINITY, f64::max);
        let unweighted_mean =
            rows.iter().map(|(_, _, c)| *c).sum::<f64>() / rows.len().max(1) as f64;
        ConformanceReport { expected, min, max, unweighted_mean, per_realization: rows }
    }
}

/// `conf(τ) = Σ_σ P(σ|τ) · conf(σ, M)` plus min/max/unweighted mean.
pub fn expected_conformance(
    dist: &RealizationDistribution,
    net: &PetriNet,
) -> Result<ConformanceReport> {
    let mut rows = Vec::with_capacity(dist.by_sequence.len());
    for (sigma, &p) in &dist.by_sequence {
        let cost = optimal_alignment_cost(sigma, net)? as f64;
        rows.push((sigma.clone(), p, cost));
    }
    Ok(ConformanceReport::from_scored(rows))
}
