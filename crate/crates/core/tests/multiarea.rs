use segpath_core::multiarea::{
    best2cope_with, cartesian_combine, merge_correction, solve_area_fronts, MultiAreaContext, MultiAreaError,
    PathCandidate, WeightedSegment,
};
use segpath_core::topology::validate_multiarea;
use segpath_core::yargg::{generate_topology, synthetic_cities, GenConfig};
use segpath_core::{best2cop, build_sr_graph, compare_fronts, DelayKey, DiscretizationConfig, MultiAreaConfig, Segment, SolverConfig, SrGraph};

fn yargg_mini(seed: u64, groups: usize, access: usize) -> segpath_core::MultiAreaGraph {
    let cities = synthetic_cities(3, 900.0, seed);
    let cfg = GenConfig { groups_per_area: groups, access_per_group: access, seed, ..GenConfig::default() };
    generate_topology(&cities, &cfg).unwrap()
}

#[test]
fn three_area_fixture_matches_flat_solve() {
    let mg = yargg_mini(7, 2, 8);
    assert!(validate_multiarea(&mg).is_valid());
    let disc = DiscretizationConfig::default();
    let sr = build_sr_graph(&mg.graph, &disc).unwrap();
    let solver = SolverConfig::for_graph(&sr);
    let ctx = MultiAreaContext::new(&mg, MultiAreaConfig::new(disc, solver)).unwrap();
    for src in 0..mg.graph.node_count() as u32 {
        let flat = best2cop(&sr, src, &solver).unwrap();
        let (multi, _) = best2cope_with(&ctx, src).unwrap();
        let diff = compare_fronts(&flat, &multi, DelayKey::Units);
        assert!(diff.is_empty(), "src {} ({}): {diff:?}", src, mg.graph.name(src));
    }
}

#[test]
fn third_areas_and_backbone_sources_match_flat_solve() {
    let cities = synthetic_cities(5, 900.0, 3);
    let cfg = GenConfig { groups_per_area: 2, access_per_group: 4, seed: 3, ..GenConfig::default() };
    let mg = generate_topology(&cities, &cfg).unwrap();
    let disc = DiscretizationConfig::default();
    let sr = build_sr_graph(&mg.graph, &disc).unwrap();
    let solver = SolverConfig::for_graph(&sr).with_cost_limit(2_000);
    let ctx = MultiAreaContext::new(&mg, MultiAreaConfig::new(disc, solver)).unwrap();
    for src in (0..mg.graph.node_count() as u32).step_by(3) {
        let flat = best2cop(&sr, src, &solver).unwrap();
        let (multi, _) = best2cope_with(&ctx, src).unwrap();
        assert!(compare_fronts(&flat, &multi, DelayKey::Units).is_empty(), "src {}", mg.graph.name(src));
    }
}

#[test]
fn summaries_stay_within_the_message_bound() {
    let mg = yargg_mini(11, 1, 6);
    let disc = DiscretizationConfig::default();
    let solver = SolverConfig::new(10, disc.gamma_capacity());
    let cfg = MultiAreaConfig::new(disc, solver);
    let summaries = solve_area_fronts(&mg, &cfg).unwrap();
    // Two summaries (stub area and backbone) per border router.
    assert_eq!(summaries.len(), 2 * 2 * mg.abrs.len());
    let n = mg.graph.node_count();
    for s in summaries.values() {
        assert!(s.entries <= n * solver.c0 * disc.gamma_capacity() as usize);
        assert!(s.bytes > 0);
        assert!(s.fronts.values().all(|f| !f.is_empty()));
    }
    let ctx = MultiAreaContext::new(&mg, cfg).unwrap();
    let (_, report) = best2cope_with(&ctx, 0).unwrap();
    assert!(report.summary_entries <= n * solver.c0 * disc.gamma_capacity() as usize);
}

fn node_path(sr: &SrGraph, u: u32, v: u32) -> PathCandidate {
    let e = sr.node_seg(u, v).unwrap();
    PathCandidate::from_segments(vec![WeightedSegment {
        seg: Segment::node(u, v),
        delay_units: e.delay_units,
        delay_us: e.delay_us,
        cost: e.cost,
    }])
}

#[test]
fn merge_correction_joins_node_segments_through_the_border_router() {
    let mg = yargg_mini(7, 1, 2);
    let disc = DiscretizationConfig::default();
    let sr = build_sr_graph(&mg.graph, &disc).unwrap();
    let solver = SolverConfig::new(10, disc.gamma_capacity());
    let ctx = MultiAreaContext::new(&mg, MultiAreaConfig::new(disc, solver)).unwrap();
    let access = mg.areas[&1].iter().copied().find(|&u| mg.graph.name(u).contains("-acc")).unwrap();
    let remote = mg.abrs[&2][1];
    let mut merged = 0;
    for abr in mg.abrs[&1] {
        let joined = cartesian_combine(&[node_path(&sr, access, abr)], &[node_path(&sr, abr, remote)], abr, &solver);
        assert_eq!(joined.len(), 1);
        assert_eq!(joined[0].path.d0, 2);
        let flat = sr.node_seg(access, remote).unwrap();
        let through = joined[0].path.cost == flat.cost && joined[0].path.delay_us == flat.delay_us;
        match merge_correction(&joined[0], &ctx) {
            Some(c) => {
                assert!(through);
                merged += 1;
                assert!(c.corrected);
                assert_eq!(c.path.d0, 1);
                assert_eq!(c.path.segments[0].seg, Segment::node(access, remote));
                assert_eq!((c.path.delay_units, c.path.cost), (flat.delay_units, flat.cost));
            }
            None => assert!(!through),
        }
    }
    assert!(merged >= 1);
}

#[test]
fn unsupported_settings_are_rejected() {
    let mg = yargg_mini(7, 1, 2);
    let disc = DiscretizationConfig::default();
    let solver = SolverConfig::new(10, disc.gamma_capacity()).with_k_per_cell(4);
    assert!(matches!(
        MultiAreaContext::new(&mg, MultiAreaConfig::new(disc, solver)),
        Err(MultiAreaError::Unsupported(_))
    ));
}
