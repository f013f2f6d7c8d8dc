mod common;

use common::{best_cost_worst_delay, min_encoding_len, simple_paths};
use proptest::prelude::*;
use segpath_core::encoder::{is_valid_encoding, RawPath};
use segpath_core::srgraph::compute_multimetric_spt;
use segpath_core::topology::random::{erdos_renyi, RandomGraphParams};
use segpath_core::topology::{graph_to_json, parse_flat_str};
use segpath_core::{build_sr_graph, encode_path, DiscretizationConfig, SegKind};

fn small(nodes: usize, parallel_prob: f64) -> RandomGraphParams {
    RandomGraphParams {
        nodes,
        avg_degree: 3.0,
        delay_us: (0, 3000),
        delay_step_us: 1,
        cost: (1, 4),
        parallel_prob,
    }
}

#[test]
fn encodings_are_valid_and_minimal() {
    let disc = DiscretizationConfig::default();
    for seed in 0..15 {
        let g = erdos_renyi(&small(7, 0.0), seed);
        let sr = build_sr_graph(&g, &disc).unwrap();
        let apsp = best_cost_worst_delay(&g);
        for p in simple_paths(&g, 5) {
            let enc = encode_path(&g, &sr, &p).unwrap();
            assert!(is_valid_encoding(&g, &sr, &p, &enc.segments), "{p:?} -> {enc:?}");
            assert_eq!(enc.len(), min_encoding_len(&g, &apsp, &p), "{p:?}");
        }
    }
}

#[test]
fn encoded_distances_equal_path_distances() {
    let disc = DiscretizationConfig::default();
    let g = erdos_renyi(&small(8, 0.0), 3);
    let sr = build_sr_graph(&g, &disc).unwrap();
    for p in simple_paths(&g, 4) {
        let enc = encode_path(&g, &sr, &p).unwrap();
        let (cost, delay) = (0..p.hops())
            .map(|k| g.find_link(p.nodes[k], p.nodes[k + 1], 0).unwrap())
            .fold((0, 0), |(c, d), l| (c + l.cost, d + l.delay_us));
        assert_eq!((enc.cost, enc.delay_us), (cost, delay));
    }
}

#[test]
fn single_node_paths_do_not_encode() {
    let g = erdos_renyi(&small(4, 0.0), 1);
    let sr = build_sr_graph(&g, &DiscretizationConfig::default()).unwrap();
    assert!(encode_path(&g, &sr, &RawPath::new(vec![0])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ecmp_dag_matches_path_enumeration(seed in 0u64..10_000, n in 3usize..8) {
        let g = erdos_renyi(&small(n, 0.2), seed);
        let disc = DiscretizationConfig::default();
        let apsp = best_cost_worst_delay(&g);
        for root in 0..n as u32 {
            let dag = compute_multimetric_spt(&g, &disc, root);
            for (v, best) in apsp[root as usize].iter().enumerate() {
                let (cost, delay) = best.unwrap();
                prop_assert_eq!(dag.cost_to[v], cost);
                prop_assert_eq!(dag.max_delay_us[v], delay);
                prop_assert_eq!(dag.max_delay_units[v], disc.discretize(delay));
            }
        }
    }

    #[test]
    fn adjacency_segments_form_an_antichain(seed in 0u64..10_000, n in 2usize..9) {
        let g = erdos_renyi(&small(n, 0.4), seed);
        let sr = build_sr_graph(&g, &DiscretizationConfig::default()).unwrap();
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u == v {
                    prop_assert!(sr.edges(u, v).is_empty());
                    continue;
                }
                let edges = sr.edges(u, v);
                prop_assert_eq!(edges[0].kind, SegKind::Node);
                let node = edges[0];
                let adj: Vec<_> = edges[1..].iter().collect();
                for (i, a) in adj.iter().enumerate() {
                    prop_assert_eq!(a.kind, SegKind::Adj);
                    let link = g.find_link(u, v, a.link_index.unwrap()).unwrap();
                    prop_assert_eq!((a.cost, a.delay_us), (link.cost, link.delay_us));
                    prop_assert!(!(node.delay_units <= a.delay_units && node.cost <= a.cost));
                    for b in &adj[i + 1..] {
                        prop_assert!(!(b.delay_units <= a.delay_units && b.cost <= a.cost));
                        prop_assert!(!(a.delay_units <= b.delay_units && a.cost <= b.cost));
                    }
                }
            }
        }
    }

    #[test]
    fn flat_topology_round_trips_through_json(seed in 0u64..10_000, n in 2usize..12) {
        let g = erdos_renyi(&small(n, 0.3), seed);
        let back = parse_flat_str(&graph_to_json(&g)).unwrap();
        prop_assert_eq!(graph_to_json(&back), graph_to_json(&g));
        prop_assert_eq!(back.link_count(), g.link_count());
    }
}
