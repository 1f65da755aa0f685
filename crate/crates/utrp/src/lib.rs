//! Exact realization probabilities and probability-weighted conformance
//! for uncertain process traces.
//!
//! The pipeline: parse an uncertain trace ([`io`]), build its behavior
//! graph and enumerate realizations ([`partial_order`]), compute each
//! realization's exact probability via nested order-statistics integrals
//! ([`probability`]), validate against a weighted behavior-net simulator
//! and a generative sampler ([`behavior_net`]), and weight alignment
//! costs against a reference Petri net ([`petri`]).

pub mod behavior_net;
pub mod core_model;
pub mod density;
pub mod error;
pub mod io;
pub mod partial_order;
pub mod petri;
pub mod probability;

pub use behavior_net::{
    assign_weights, construct_behavior_net, generative_sample, simulate, BehaviorNet,
    SimulationReport,
};
pub use core_model::{
    ActivitySpec, IndeterminacySpec, TimestampSpec, UncertainEvent, UncertainLog, UncertainTrace,
};
pub use density::{Piece, PiecewiseDensity, Poly};
pub use error::{Error, Result};
pub use partial_order::{
    build_behavior_graph, enumerate_order_realizations, expand_realizations, BehaviorGraph,
    OrderRealization, Realization, DEFAULT_CAP,
};
pub use petri::{
    expected_conformance, optimal_alignment, optimal_alignment_cost, Alignment, ConformanceReport,
    Move, PetriNet, Transition,
};
pub use probability::{
    activity_probability, order_probability, order_probability_integral, realization_distribution,
    OrderEntry, RealizationDistribution, TieMode,
};
