//! Realization probabilities: the order-probability integral `I(ρ)`, the
//! order-realization probability `P_O(ρ|τ)`, the activity probability
//! `P_A(σ|ρ)`, and the full distribution `P(σ|τ)`.
//!
//! `I(ρ)` is `P(X_1 ≤ X_2 ≤ ... ≤ X_n)` for independent timestamps with
//! piecewise-polynomial densities or point masses. It is computed by the
//! backward recursion
//!
//! ```text
//! G_{n+1}(x) = 1
//! G_i(x)     = ∫_{max(a_i, x)}^{b_i} f_i(t) · G_{i+1}(t) dt      (density)
//! G_i(x)     = [x ≤ t_i] · G_{i+1}(t_i)                          (point mass)
//! I(ρ)       = G_1(-∞)
//! ```
//!
//! Every `G_i` stays piecewise polynomial, so the result is exact up to
//! floating-point rounding. The paper-style redundant upper bounds
//! `min{b_i,...,b_n}` are omitted: any point violating them contributes zero
//! mass, which the recursion clamps away (tested against nested quadrature
//! of the bounded form).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::core_model::{TimestampSpec, UncertainEvent, UncertainTrace};
use crate::density::{PiecewiseDensity, Poly};
use crate::error::{Error, Result};
use crate::partial_order::{
    build_behavior_graph, enumerate_order_realizations, expand_realizations, OrderRealization,
    Realization,
};

/// Handling of exact point-timestamp ties inside an order-realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieMode {
    /// Distribute a k-way tied block's mass uniformly over its k! orderings.
    #[default]
    Distribute,
    /// Treat exact ties as an error.
    Strict,
}

/// Per-order-realization entry of a [`RealizationDistribution`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderEntry {
    pub rho: OrderRealization,
    /// The ordering integral `I(ρ)`.
    pub integral: f64,
    /// `P_O(ρ|τ)`: the integral times the indeterminacy factors.
    pub probability: f64,
}

/// The full distribution over realizations of one trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationDistribution {
    /// `P(σ|τ)` per activity sequence; sequences merged across enablers.
    pub by_sequence: BTreeMap<Realization, f64>,
    /// Per-ρ breakdown, lexicographic by event-id sequence.
    pub by_order: Vec<OrderEntry>,
    /// For each sequence, the enabling entries as `(index into by_order, P_A)`.
    pub provenance: BTreeMap<Realization, Vec<(usize, f64)>>,
}

impl RealizationDistribution {
    pub fn total_probability(&self) -> f64 {
        self.by_sequence.values().sum()
    }

    pub fn total_order_probability(&self) -> f64 {
        self.by_order.iter().map(|e| e.probability).sum()
    }
}

enum Ts {
    Point(f64),
    Density(PiecewiseDensity),
}

fn timestamp_of(event: &UncertainEvent) -> Result<Ts> {
    match &event.timestamp {
        TimestampSpec::Point(t) => Ok(Ts::Point(*t)),
        TimestampSpec::StrongInterval { lo, hi } if lo == hi => Ok(Ts::Point(*lo)),
        TimestampSpec::StrongInterval { .. } => Err(Error::NotNormalized(event.id.clone())),
        TimestampSpec::WeakDensity(d) => Ok(Ts::Density(d.clone())),
    }
}

/// Piecewise-polynomial tail function: `left` for `x < breaks[0]`,
/// `polys[j]` on `[breaks[j], breaks[j+1])`, and 0 beyond the last break.
struct TailFn {
    breaks: Vec<f64>,
    polys: Vec<Poly>,
    left: f64,
}

impl TailFn {
    fn one() -> Self {
        TailFn { breaks: vec![f64::INFINITY], polys: vec![], left: 1.0 }
    }

    fn step(t: f64, v: f64) -> Self {
        TailFn { breaks: vec![t], polys: vec![], left: v }
    }

    /// Evaluation with the left-inclusive convention at the first break, so
    /// `[x ≤ t]` holds with equality for point-mass steps.
    fn eval(&self, x: f64) -> f64 {
        if x < self.breaks[0] || (self.polys.is_empty() && x <= self.breaks[0]) {
            return self.left;
        }
        for j in 0..self.polys.len() {
            if x < self.breaks[j + 1] {
                return self.polys[j].eval(x);
            }
        }
        0.0
    }

    fn region_value(&self, mid: f64) -> Poly {
        if mid < self.breaks[0] {
            return Poly::constant(self.left);
        }
        for j in 0..self.polys.len() {
            if mid < self.breaks[j + 1] {
                return self.polys[j].clone();
            }
        }
        Poly::zero()
    }

    /// `x ↦ ∫_x^∞ f(t) · self(t) dt` for a compactly supported density.
    fn integrate_against(&self, density: &PiecewiseDensity) -> TailFn {
        let (a, b) = density.support();
        let mut cuts: Vec<f64> = vec![a, b];
        for &c in &self.breaks {
            if c > a && c < b {
                cuts.push(c);
            }
        }
        for p in density.pieces() {
            for c in [p.lo, p.hi] {
                if c > a && c < b {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();

        // product pieces f(t)·G(t) on each cut interval
        let m = cuts.len() - 1;
        let mut products: Vec<Poly> = Vec::with_capacity(m);
        for j in 0..m {
            let mid = 0.5 * (cuts[j] + cuts[j + 1]);
            let f_poly = density
                .pieces()
                .iter()
                .find(|p| mid >= p.lo && mid < p.hi)
                .map(|p| p.absolute_poly())
                .unwrap_or_else(Poly::zero);
            products.push(f_poly.mul(&self.region_value(mid)));
        }

        // tail integrals, right to left
        let mut polys: Vec<Poly> = vec![Poly::zero(); m];
        let mut tail = 0.0;
        for j in (0..m).rev() {
            let anti = products[j].antiderivative();
            // T_j(x) = tail + A(hi) - A(x)
            let c = tail + anti.eval(cuts[j + 1]);
            let mut coeffs: Vec<f64> = anti.0.iter().map(|v| -v).collect();
            if coeffs.is_empty() {
                coeffs.push(c);
            } else {
                coeffs[0] += c;
            }
            polys[j] = Poly(coeffs);
            tail += products[j].integral(cuts[j], cuts[j + 1]);
        }
        TailFn { breaks: cuts, polys, left: tail }
    }

    fn max_degree(&self) -> usize {
        self.polys.iter().map(|p| p.degree()).max().unwrap_or(0)
    }
}

/// `I(ρ)`: the probability that the events' timestamps occur in the order
/// given by `ρ`. Exact for point and piecewise-polynomial timestamps.
pub fn order_probability_integral(rho: &OrderRealization, trace: &UncertainTrace) -> Result<f64> {
    order_probability_integral_with(rho, trace, TieMode::Distribute)
}

pub fn order_probability_integral_with(
    rho: &OrderRealization,
    trace: &UncertainTrace,
    ties: TieMode,
) -> Result<f64> {
    if rho.events.is_empty() {
        return Ok(1.0);
    }
    let events: Vec<&UncertainEvent> = rho
        .events
        .iter()
        .map(|id| {
            trace
                .event(id)
                .ok_or_else(|| Error::Validation(format!("unknown event id {id}")))
        })
        .collect::<Result<_>>()?;
    let stamps: Vec<Ts> = events.iter().map(|e| timestamp_of(e)).collect::<Result<_>>()?;

    // ties between included point timestamps: each maximal consecutive run of
    // k equal points keeps 1/k! of the block's mass
    let mut tie_factor = 1.0;
    let mut run = 1u64;
    for i in 1..stamps.len() {
        match (&stamps[i - 1], &stamps[i]) {
            (Ts::Point(a), Ts::Point(b)) if a == b => {
                if ties == TieMode::Strict {
                    return Err(Error::TimestampTie(
                        events[i - 1].id.clone(),
                        events[i].id.clone(),
                    ));
                }
                run += 1;
                tie_factor /= run as f64;
            }
            _ => run = 1,
        }
    }

    // rescale all timestamps into [0,1] to keep polynomial arithmetic benign
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in &events {
        let (a, b) = e.time_bounds();
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let span = if hi > lo { hi - lo } else { 1.0 };

    let mut g = TailFn::one();
    let mut warned = false;
    for ts in stamps.iter().rev() {
        match ts {
            Ts::Point(t) => {
                let t = (t - lo) / span;
                g = TailFn::step(t, g.eval(t));
            }
            Ts::Density(d) => {
                g = g.integrate_against(&d.affine(lo, span));
            }
        }
        if !warned && g.max_degree() > 50 {
            eprintln!(
                "warning: order integral polynomial degree {} may lose precision",
                g.max_degree()
            );
            warned = true;
        }
    }
    Ok((g.left * tie_factor).clamp(0.0, 1.0))
}

/// `P_O(ρ|τ) = I(ρ) · Π_{e ∈ ρ} (1 - f_O(?)) · Π_{e ∉ ρ} f_O(?)`.
pub fn order_probability(rho: &OrderRealization, trace: &UncertainTrace) -> Result<f64> {
    order_probability_with(rho, trace, TieMode::Distribute)
}

pub fn order_probability_with(
    rho: &OrderRealization,
    trace: &UncertainTrace,
    ties: TieMode,
) -> Result<f64> {
    let mut p = order_probability_integral_with(rho, trace, ties)?;
    for e in &trace.events {
        if e.is_indeterminate() {
            let skip = e.skip_probability()?;
            if rho.events.iter().any(|id| *id == e.id) {
                p *= 1.0 - skip;
            } else {
                p *= skip;
            }
        }
    }
    Ok(p)
}

/// `P_A(σ|ρ) = Π_i f_A^{e_i}(a_i)`; 0 when `ρ` does not enable `σ`.
pub fn activity_probability(
    sigma: &Realization,
    rho: &OrderRealization,
    trace: &UncertainTrace,
) -> Result<f64> {
    if sigma.labels.len() != rho.events.len() {
        return Ok(0.0);
    }
    let mut p = 1.0;
    for (a, id) in sigma.labels.iter().zip(&rho.events) {
        let e = trace
            .event(id)
            .ok_or_else(|| Error::Validation(format!("unknown event id {id}")))?;
        p *= e.label_probability(a)?;
        if p == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(p)
}

/// The full realization distribution `P(σ|τ) = Σ_ρ P_O(ρ|τ) · P_A(σ|ρ)`.
pub fn realization_distribution(
    trace: &UncertainTrace,
    cap: u64,
) -> Result<RealizationDistribution> {
    for e in &trace.events {
        if !e.is_normalized() {
            return Err(Error::NotNormalized(e.id.clone()));
        }
    }
    let graph = build_behavior_graph(trace)?;
    let rhos = enumerate_order_realizations(trace, &graph, cap)?;

    let mut by_order = Vec::with_capacity(rhos.len());
    let mut by_sequence: BTreeMap<Realization, f64> = BTreeMap::new();
    let mut provenance: BTreeMap<Realization, Vec<(usize, f64)>> = BTreeMap::new();
    let mut realization_count = 0u64;

    for (idx, rho) in rhos.into_iter().enumerate() {
        let integral = order_probability_integral(&rho, trace)?;
        let probability = order_probability(&rho, trace)?;
        let sigmas = expand_realizations(&rho, trace, cap)?;
        realization_count += sigmas.len() as u64;
        if realization_count > cap {
            return Err(Error::CapExceeded { cap });
        }
        for sigma in sigmas {
            let pa = activity_probability(&sigma, &rho, trace)?;
            *by_sequence.entry(sigma.clone()).or_insert(0.0) += probability * pa;
            provenance.entry(sigma).or_default().push((idx, pa));
        }
        by_order.push(OrderEntry { rho, integral, probability });
    }
    Ok(RealizationDistribution { by_sequence, by_order, provenance })
}
