//! Instances shared by the benchmarks.

use segpath_core::topology::random::{erdos_renyi, RandomGraphParams};
use segpath_core::yargg::{generate_topology, synthetic_cities, GenConfig};
use segpath_core::{build_sr_graph, DiscretizationConfig, Graph, MultiAreaGraph, SrGraph};

/// Random graph with the evaluation defaults and its SR graph (γ = 10,
/// c1 = 100 ms).
pub fn random_instance(nodes: usize, seed: u64) -> (Graph, SrGraph) {
    let g = erdos_renyi(&RandomGraphParams::evaluation(nodes), seed);
    let sr = build_sr_graph(&g, &DiscretizationConfig::default()).expect("generated graphs are connected");
    (g, sr)
}

/// YARGG topology over `cities` synthetic cities with smaller areas.
pub fn yargg_instance(cities: usize, groups: usize, access: usize, seed: u64) -> MultiAreaGraph {
    let table = synthetic_cities(cities, 900.0, seed);
    let cfg = GenConfig { groups_per_area: groups, access_per_group: access, seed, ..GenConfig::default() };
    generate_topology(&table, &cfg).expect("synthetic tables have enough cities")
}
