//! Lane-level routing along a fixed segment path.
//!
//! Given a road network whose segments carry lanes and lane-to-lane turn
//! connections, and a path through that network, this crate builds a staged
//! lane-level graph, computes the lexicographically optimal lane assignment
//! (fewest forbidden turns, then fewest unwanted turns, then fewest lane
//! changes), and derives driver guidance from it.
//!
//! Pipeline: [`model::RoadNetwork`] + [`model::Path`] -> [`model::validate_path`]
//! -> [`graph::LaneLevelGraph::build`] -> [`solver::solve_sweep`] (or
//! [`solver::solve_dijkstra`]) -> [`guidance::emit_instructions`].

pub mod cost;
pub mod dot;
pub mod format;
pub mod graph;
pub mod greedy;
pub mod guidance;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod synth;

pub use cost::CostTuple;
pub use dot::export_dot;
pub use graph::{Arc, ArcKind, LaneLevelGraph, LaneNode, NodeEnd, pod_arc_bound};
pub use greedy::solve_greedy;
pub use guidance::{Instruction, emit_instructions, replay_instructions};
pub use model::{
    Convenience, IntersectionId, Path, PathError, RoadNetwork, Segment, SegmentId,
    TurnConnection, ValidatedPath, ValidationReport, validate_network, validate_path,
};
pub use oracle::{OracleError, OracleResult, oracle_best};
pub use solver::{Traversal, TraversalEvent, event_cost_sum, solve_dijkstra, solve_sweep};
pub use synth::{GenSpec, gen_dependency_chain, gen_random};
