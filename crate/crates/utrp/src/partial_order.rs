//! Behavior graphs (the timestamp partial order) and enumeration of
//! order-realizations and realizations.
//!
//! `e ≺ e'` holds iff `t_max(e) < t_min(e')`. The behavior graph stores the
//! transitive reduction of `≺`; enumeration works on the full relation so
//! that constraints survive the exclusion of skipped indeterminate events.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::core_model::{ActivityLabel, EventId, UncertainTrace};
use crate::error::{Error, Result};

/// Default cap on enumerated order-realizations / realizations.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Transitive reduction of the timestamp partial order over a trace's events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorGraph {
    /// Event ids, sorted.
    pub nodes: Vec<EventId>,
    /// Reduction edges `(u, v)` with `u ≺ v` and no `w` strictly between.
    pub edges: BTreeSet<(EventId, EventId)>,
    /// The full relation `≺`, kept for enumeration over event subsets.
    closure: BTreeSet<(EventId, EventId)>,
}

impl BehaviorGraph {
    pub fn precedes(&self, u: &str, v: &str) -> bool {
        self.closure.contains(&(u.to_string(), v.to_string()))
    }

    /// Events with no `≺`-predecessor.
    pub fn minimal_events(&self) -> Vec<EventId> {
        self.nodes
            .iter()
            .filter(|v| !self.closure.iter().any(|(_, b)| b == *v))
            .cloned()
            .collect()
    }

    /// Events with no `≺`-successor.
    pub fn maximal_events(&self) -> Vec<EventId> {
        self.nodes
            .iter()
            .filter(|v| !self.closure.iter().any(|(a, _)| a == *v))
            .cloned()
            .collect()
    }

    /// In-neighbors in the reduction.
    pub fn predecessors(&self, v: &str) -> Vec<EventId> {
        self.edges
            .iter()
            .filter(|(_, b)| b == v)
            .map(|(a, _)| a.clone())
            .collect()
    }

    pub fn successors(&self, v: &str) -> Vec<EventId> {
        self.edges
            .iter()
            .filter(|(a, _)| a == v)
            .map(|(_, b)| b.clone())
            .collect()
    }
}

/// A sequence of distinct events consistent with `≺`, containing every
/// determinate event.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderRealization {
    pub events: Vec<EventId>,
}

/// An activity-label sequence obtained by fixing one label per event.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Realization {
    pub labels: Vec<ActivityLabel>,
}

impl std::fmt::Display for Realization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "⟨{}⟩", self.labels.join(","))
    }
}

/// Builds the behavior graph of a trace.
pub fn build_behavior_graph(trace: &UncertainTrace) -> Result<BehaviorGraph> {
    if trace.events.is_empty() {
        return Err(Error::Validation(format!(
            "trace {} has no events",
            trace.case
        )));
    }
    let nodes: Vec<EventId> = trace.events.iter().map(|e| e.id.clone()).collect();
    let bounds: BTreeMap<&str, (f64, f64)> = trace
        .events
        .iter()
        .map(|e| (e.id.as_str(), e.time_bounds()))
        .collect();
    let n = nodes.len();
    let mut before = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (_, hi_i) = bounds[nodes[i].as_str()];
                let (lo_j, _) = bounds[nodes[j].as_str()];
                before[i][j] = hi_i < lo_j;
            }
        }
    }
    let mut closure = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if before[i][j] {
                closure.insert((nodes[i].clone(), nodes[j].clone()));
                let implied = (0..n).any(|k| before[i][k] && before[k][j]);
                if !implied {
                    edges.insert((nodes[i].clone(), nodes[j].clone()));
                }
            }
        }
    }
    Ok(BehaviorGraph { nodes, edges, closure })
}

/// Enumerates exactly the order-realizations of the trace: for every subset
/// of the indeterminate events, every linear extension of `≺` restricted to
/// the determinate events plus that subset. Output is sorted
/// lexicographically by event-id sequence.
pub fn enumerate_order_realizations(
    trace: &UncertainTrace,
    graph: &BehaviorGraph,
    cap: u64,
) -> Result<Vec<OrderRealization>> {
    assert!(cap >= 1, "cap must be at least 1");
    let determinate: Vec<&str> = trace
        .events
        .iter()
        .filter(|e| !e.is_indeterminate())
        .map(|e| e.id.as_str())
        .collect();
    let indeterminate: Vec<&str> = trace
        .events
        .iter()
        .filter(|e| e.is_indeterminate())
        .map(|e| e.id.as_str())
        .collect();
    if indeterminate.len() >= 63 {
        return Err(Error::CapExceeded { cap });
    }

    let mut out: Vec<OrderRealization> = Vec::new();
    for mask in 0u64..(1u64 << indeterminate.len()) {
        let mut included: Vec<&str> = determinate.clone();
        for (k, id) in indeterminate.iter().enumerate() {
            if mask & (1 << k) != 0 {
                included.push(id);
            }
        }
        included.sort();
        linear_extensions(graph, &included, cap, &mut out)?;
    }
    out.sort();
    Ok(out)
}

/// Backtracking over minimal unvisited events; each extension is emitted once.
fn linear_extensions(
    graph: &BehaviorGraph,
    included: &[&str],
    cap: u64,
    out: &mut Vec<OrderRealization>,
) -> Result<()> {
    let n = included.len();
    // precedence restricted to the included events
    let prec: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| graph.precedes(included[j], included[i])).collect())
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut prefix: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn recurse(
        prec: &Vec<Vec<bool>>,
        included: &[&str],
        remaining: &mut Vec<usize>,
        prefix: &mut Vec<usize>,
        used: &mut Vec<bool>,
        cap: u64,
        out: &mut Vec<OrderRealization>,
    ) -> Result<()> {
        if prefix.len() == included.len() {
            if out.len() as u64 >= cap {
                return Err(Error::CapExceeded { cap });
            }
            out.push(OrderRealization {
                events: prefix.iter().map(|&i| included[i].to_string()).collect(),
            });
            return Ok(());
        }
        let candidates: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| (0..included.len()).all(|j| used[j] || !prec[i][j]))
            .collect();
        for i in candidates {
            used[i] = true;
            remaining.retain(|&x| x != i);
            prefix.push(i);
            recurse(prec, included, remaining, prefix, used, cap, out)?;
            prefix.pop();
            remaining.push(i);
            remaining.sort_unstable();
            used[i] = false;
        }
        Ok(())
    }

    recurse(&prec, included, &mut remaining, &mut prefix, &mut used, cap, out)
}

/// Cartesian product of the label sets along an order-realization, in
/// deterministic (sorted-label) order.
pub fn expand_realizations(
    rho: &OrderRealization,
    trace: &UncertainTrace,
    cap: u64,
) -> Result<Vec<Realization>> {
    let label_sets: Vec<Vec<ActivityLabel>> = rho
        .events
        .iter()
        .map(|id| {
            trace
                .event(id)
                .map(|e| e.label_set().into_iter().collect())
                .ok_or_else(|| Error::Validation(format!("unknown event id {id}")))
        })
        .collect::<Result<_>>()?;
    let total: u64 = label_sets
        .iter()
        .try_fold(1u64, |acc, s| acc.checked_mul(s.len() as u64))
        .ok_or(Error::CapExceeded { cap })?;
    if total > cap {
        return Err(Error::CapExceeded { cap });
    }
    let mut out = vec![Realization { labels: Vec::new() }];
    for set in &label_sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for r in &out {
            for a in set {
                let mut labels = r.labels.clone();
                labels.push(a.clone());
                next.push(Realization { labels });
            }
        }
        out = next;
    }
    Ok(out)
}
