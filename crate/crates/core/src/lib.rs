//! Exact computation of all non-dominated (segments, delay, cost) paths in
//! Segment Routing domains.
//!
//! The pipeline is: a raw [`Graph`] is turned into an SR graph ([`SrGraph`])
//! whose edges are node and adjacency segments; [`best2cop`] then computes,
//! for every destination and every segment budget, the Pareto front of
//! (delay, cost) pairs, from which [`query_2cop`] answers delay-constrained
//! least-cost and related queries. Multi-area topologies are handled by
//! [`best2cope`], which combines per-area results through the border routers.

pub mod encoder;
pub mod multiarea;
pub mod oracle;
pub mod solver;
pub mod srgraph;
pub mod topology;
pub mod yargg;

pub use encoder::{encode_path, EncoderState, RawPath, Segment, SegmentList};
pub use multiarea::{best2cope, MultiAreaConfig};
pub use oracle::{brute_force_fronts, compare_fronts, mc_dijkstra_solve, DelayKey, FrontDiff};
pub use solver::{
    best2cop, query_2cop, reconstruct_segments, FrontEntry, Objective, ParetoFront3D, SolverConfig,
};
pub use srgraph::{build_sr_graph, SegKind, SegmentEdge, SrGraph};
pub use topology::{DiscretizationConfig, Graph, Link, MultiAreaGraph, NodeId};
