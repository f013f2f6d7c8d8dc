use segpath_core::solver::query_2cop_free_last;
use segpath_core::topology::parse_flat_str;
use segpath_core::{
    best2cop, build_sr_graph, query_2cop, reconstruct_segments, DiscretizationConfig, Graph, Objective, SegKind,
    Segment, SolverConfig, SrGraph,
};

const GEANT: &str = include_str!("../../../fixtures/geant.json");

fn setup() -> (Graph, SrGraph) {
    let g = parse_flat_str(GEANT).unwrap();
    let sr = build_sr_graph(&g, &DiscretizationConfig::new(100, 10).unwrap()).unwrap();
    (g, sr)
}

#[test]
fn direct_frankfurt_vienna_link_keeps_its_adjacency_segment() {
    let (g, sr) = setup();
    let (f, v) = (g.id_of("Frankfurt").unwrap(), g.id_of("Vienna").unwrap());
    let edges = sr.edges(f, v);
    assert_eq!(edges.len(), 2);
    assert_eq!((edges[0].kind, edges[0].delay_units, edges[0].cost), (SegKind::Node, 85, 3));
    assert_eq!((edges[1].kind, edges[1].delay_units, edges[1].cost), (SegKind::Adj, 50, 10));
}

#[test]
fn frankfurt_vienna_front() {
    let (g, sr) = setup();
    let (f, v) = (g.id_of("Frankfurt").unwrap(), g.id_of("Vienna").unwrap());
    let front = best2cop(&sr, f, &SolverConfig::new(3, 1000)).unwrap();
    let pairs: Vec<_> = front.front(3, v).iter().map(|e| (e.delay_units, e.cost)).collect();
    assert_eq!(pairs, vec![(50, 10), (67, 4), (85, 3)]);
}

#[test]
fn delay_constrained_query_goes_through_budapest() {
    let (g, sr) = setup();
    let id = |s| g.id_of(s).unwrap();
    let front = best2cop(&sr, id("Frankfurt"), &SolverConfig::new(3, 1000)).unwrap();
    let ans = query_2cop(&front, Objective::M2, 3, 70, u64::MAX, id("Vienna")).unwrap();
    assert_eq!((ans.entry.delay_units, ans.entry.cost), (67, 4));
    let segs = reconstruct_segments(&front, Some(&sr), id("Vienna"), &ans.entry);
    assert_eq!(
        segs.segments,
        vec![Segment::node(id("Frankfurt"), id("Budapest")), Segment::node(id("Budapest"), id("Vienna"))]
    );
}

#[test]
fn fastest_geneva_budapest_path_uses_milan() {
    let (g, sr) = setup();
    let id = |s| g.id_of(s).unwrap();
    let front = best2cop(&sr, id("Geneva"), &SolverConfig::new(3, 1000)).unwrap();
    let ans = query_2cop(&front, Objective::M1, 3, 1000, u64::MAX, id("Budapest")).unwrap();
    assert_eq!((ans.entry.delay_units, ans.entry.cost), (77, 4));
    let segs = reconstruct_segments(&front, Some(&sr), id("Budapest"), &ans.entry);
    assert_eq!(
        segs.segments,
        vec![Segment::node(id("Geneva"), id("Milan")), Segment::node(id("Milan"), id("Budapest"))]
    );
    let free = query_2cop_free_last(&front, Some(&sr), Objective::M1, 3, 1000, u64::MAX, id("Budapest")).unwrap();
    assert!(free.entry.delay_units <= ans.entry.delay_units);
}

#[test]
fn infeasible_query_has_no_answer() {
    let (g, sr) = setup();
    let id = |s| g.id_of(s).unwrap();
    let front = best2cop(&sr, id("Frankfurt"), &SolverConfig::new(3, 1000)).unwrap();
    assert!(query_2cop(&front, Objective::M2, 3, 49, u64::MAX, id("Vienna")).is_none());
}
