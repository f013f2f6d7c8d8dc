//! Reference solvers used to check [`crate::solver::best2cop`]: exhaustive
//! enumeration of segment walks, a label-correcting search on the raw graph,
//! and a front comparison report.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::encoder::{encode_path, extended_dominates, EncoderState, RawPath, Segment, SegmentList};
use crate::solver::{FrontEntry, Origin, ParetoFront3D, SolverConfig};
use crate::srgraph::SrGraph;
use crate::topology::{Graph, NodeId};

/// Which delay value fronts are built and compared on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DelayKey {
    /// Sum of per-segment truncated delays.
    Units,
    /// Exact delay in microseconds; feasibility uses its truncation.
    Exact,
}

/// Size guard of [`brute_force_fronts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceLimits {
    pub max_nodes: usize,
    pub max_c0: usize,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        BruteForceLimits { max_nodes: 10, max_c0: 5 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive enumeration: {nodes} nodes, c0 = {c0} (limits {max_nodes} nodes, c0 {max_c0})")]
    TooLarge { nodes: usize, c0: usize, max_nodes: usize, max_c0: usize },
}

struct Candidate {
    delay_units: u64,
    delay_us: u64,
    cost: u64,
    segments: Vec<Segment>,
}

/// Pareto-reduces candidates into a front: sorted by delay, then cost, then
/// segment count, keeping entries that strictly improve the running cost.
fn reduce(mut cands: Vec<(FrontEntry, SegmentList)>, key: DelayKey) -> Vec<(FrontEntry, SegmentList)> {
    let delay = |e: &FrontEntry| match key {
        DelayKey::Units => e.delay_units,
        DelayKey::Exact => e.delay_us,
    };
    cands.sort_by_key(|(e, _)| (delay(e), e.cost, e.segments));
    let mut out: Vec<(FrontEntry, SegmentList)> = Vec::new();
    for c in cands {
        if out.last().is_none_or(|(l, _)| c.0.cost < l.cost) {
            out.push(c);
        }
    }
    out
}

fn to_front(
    src: NodeId,
    n: usize,
    c0: usize,
    buckets: Vec<Vec<(FrontEntry, SegmentList)>>,
    key: DelayKey,
) -> ParetoFront3D {
    let mut levels = Vec::with_capacity(c0 + 1);
    for i in 0..=c0 {
        let level = buckets
            .iter()
            .map(|cands| {
                let within = cands.iter().filter(|(e, _)| e.segments as usize <= i).cloned().collect();
                reduce(within, key)
            })
            .collect();
        levels.push(level);
    }
    ParetoFront3D::from_explicit(src, n, levels)
}

fn entry(delay_units: u64, delay_us: u64, cost: u64, segments: usize) -> FrontEntry {
    FrontEntry { delay_units, delay_us, cost, segments: segments as u32, origin: Origin::Source }
}

/// Enumerates every walk of at most `c0` segments in G′ from `src` and
/// returns the cumulative fronts, with the default size guard and summed
/// truncated delays.
pub fn brute_force_fronts(
    sr: &SrGraph,
    src: NodeId,
    c0: usize,
    c1_units: u64,
    c2: u64,
) -> Result<ParetoFront3D, OracleError> {
    brute_force_fronts_with(sr, src, c0, c1_units, c2, DelayKey::Units, BruteForceLimits::default())
}

/// [`brute_force_fronts`] with an explicit delay key and size guard.
pub fn brute_force_fronts_with(
    sr: &SrGraph,
    src: NodeId,
    c0: usize,
    c1_units: u64,
    c2: u64,
    key: DelayKey,
    limits: BruteForceLimits,
) -> Result<ParetoFront3D, OracleError> {
    let n = sr.node_count();
    if n > limits.max_nodes || c0 > limits.max_c0 {
        return Err(OracleError::TooLarge { nodes: n, c0, max_nodes: limits.max_nodes, max_c0: limits.max_c0 });
    }
    let disc = *sr.discretization();
    let mut found: Vec<Vec<Candidate>> = (0..n).map(|_| Vec::new()).collect();
    found[src as usize].push(Candidate { delay_units: 0, delay_us: 0, cost: 0, segments: Vec::new() });

    // Depth-first over walks; each stack frame is the walk so far.
    let mut stack = vec![(src, 0u64, 0u64, 0u64, Vec::<Segment>::new())];
    while let Some((u, units, us, cost, segs)) = stack.pop() {
        if segs.len() == c0 {
            continue;
        }
        for v in 0..n as NodeId {
            for e in sr.edges(u, v) {
                let (nu, nus, nc) = (units + e.delay_units, us + e.delay_us, cost.saturating_add(e.cost));
                let delay_for_limit = match key {
                    DelayKey::Units => nu,
                    DelayKey::Exact => disc.discretize(nus),
                };
                if delay_for_limit > c1_units || nc > c2 {
                    continue;
                }
                let mut next = segs.clone();
                next.push(Segment { kind: e.kind, from: u, to: v, link_index: e.link_index });
                found[v as usize].push(Candidate { delay_units: nu, delay_us: nus, cost: nc, segments: next.clone() });
                stack.push((v, nu, nus, nc, next));
            }
        }
    }

    let buckets = found
        .into_iter()
        .map(|cands| {
            cands
                .into_iter()
                .map(|c| {
                    let units = match key {
                        DelayKey::Units => c.delay_units,
                        DelayKey::Exact => disc.discretize(c.delay_us),
                    };
                    let e = entry(units, c.delay_us, c.cost, c.segments.len());
                    let list = SegmentList {
                        segments: c.segments,
                        delay_units: c.delay_units,
                        delay_us: c.delay_us,
                        cost: c.cost,
                    };
                    (e, list)
                })
                .collect()
        })
        .collect();
    Ok(to_front(src, n, c0, buckets, key))
}

struct Label {
    state: EncoderState,
    parent: u32,
    link: u32,
    alive: bool,
}

const ROOT: u32 = u32::MAX;

/// Multi-criteria label-correcting search on the raw graph. Labels carry the
/// incremental encoding of their path, so segment count, delay and cost are
/// the values the encoded segment list guarantees; pruning uses
/// [`extended_dominates`]. `sr` must be the SR graph of `g`.
pub fn mc_dijkstra_solve(g: &Graph, sr: &SrGraph, cfg: &SolverConfig, src: NodeId) -> ParetoFront3D {
    let n = g.node_count();
    let mut arena = vec![Label { state: EncoderState::start(src), parent: ROOT, link: 0, alive: true }];
    let mut at: Vec<Vec<u32>> = vec![Vec::new(); n];
    at[src as usize].push(0);
    let mut queue = VecDeque::from([0u32]);
    let link_pos: Vec<Vec<usize>> = {
        let mut by_src = vec![Vec::new(); n];
        for (k, l) in g.links().iter().enumerate() {
            by_src[l.src as usize].push(k);
        }
        by_src
    };

    while let Some(id) = queue.pop_front() {
        if !arena[id as usize].alive {
            continue;
        }
        let state = arena[id as usize].state;
        for &k in &link_pos[state.node as usize] {
            let next = state.extend(sr, g.link(k));
            if next.segments as usize > cfg.c0 || next.delay_units > cfg.c1_units || next.cost > cfg.c2 {
                continue;
            }
            let y = next.node as usize;
            if at[y].iter().any(|&o| extended_dominates(&next, &arena[o as usize].state)) {
                continue;
            }
            at[y].retain(|&o| {
                let keep = !extended_dominates(&arena[o as usize].state, &next);
                if !keep {
                    arena[o as usize].alive = false;
                }
                keep
            });
            let new_id = arena.len() as u32;
            arena.push(Label { state: next, parent: id, link: k as u32, alive: true });
            at[y].push(new_id);
            queue.push_back(new_id);
        }
    }

    let buckets = at
        .iter()
        .map(|ids| {
            ids.iter()
                .map(|&id| {
                    let st = arena[id as usize].state;
                    let list = if id == 0 {
                        SegmentList::default()
                    } else {
                        let mut nodes = vec![st.node];
                        let mut links = Vec::new();
                        let mut cur = id;
                        while arena[cur as usize].parent != ROOT {
                            let l = g.link(arena[cur as usize].link as usize);
                            nodes.push(l.src);
                            links.push(l.link_index);
                            cur = arena[cur as usize].parent;
                        }
                        nodes.reverse();
                        links.reverse();
                        encode_path(g, sr, &RawPath::with_links(nodes, links)).expect("search follows graph links")
                    };
                    (entry(st.delay_units, st.delay_us, st.cost, st.segments as usize), list)
                })
                .collect()
        })
        .collect();
    to_front(src, n, cfg.c0, buckets, DelayKey::Units)
}

/// Differences found in one (destination, budget) bucket, as (delay, cost)
/// pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BucketDiff {
    pub dst: NodeId,
    pub level: usize,
    /// In B but not in A.
    pub missing_from_a: Vec<(u64, u64)>,
    /// In A but not in B.
    pub missing_from_b: Vec<(u64, u64)>,
    /// Entries of A strictly dominated by an entry of B.
    pub dominated_in_a: Vec<(u64, u64)>,
    /// Entries of B strictly dominated by an entry of A.
    pub dominated_in_b: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FrontDiff {
    pub buckets: Vec<BucketDiff>,
}

impl FrontDiff {
    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    /// Number of (delay, cost) pairs present on one side only.
    pub fn mismatch_count(&self) -> usize {
        self.buckets.iter().map(|b| b.missing_from_a.len() + b.missing_from_b.len()).sum()
    }
}

fn keys(front: &[FrontEntry], key: DelayKey) -> Vec<(u64, u64)> {
    let mut k: Vec<(u64, u64)> = front
        .iter()
        .map(|e| match key {
            DelayKey::Units => (e.delay_units, e.cost),
            DelayKey::Exact => (e.delay_us, e.cost),
        })
        .collect();
    k.sort_unstable();
    k.dedup();
    k
}

fn strictly_dominated(x: &[(u64, u64)], by: &[(u64, u64)]) -> Vec<(u64, u64)> {
    x.iter()
        .filter(|a| by.iter().any(|b| b.0 <= a.0 && b.1 <= a.1 && b != *a))
        .copied()
        .collect()
}

/// Set comparison of two fronts bucket by bucket, on the levels both fronts
/// have.
///
/// # Panics
/// Panics if the fronts cover different node counts.
pub fn compare_fronts(a: &ParetoFront3D, b: &ParetoFront3D, key: DelayKey) -> FrontDiff {
    assert_eq!(a.node_count(), b.node_count(), "fronts over different graphs");
    let mut buckets = Vec::new();
    for d in 0..a.node_count() as NodeId {
        for level in 0..=a.c0().min(b.c0()) {
            let ka = keys(a.front(level, d), key);
            let kb = keys(b.front(level, d), key);
            if ka == kb {
                continue;
            }
            buckets.push(BucketDiff {
                dst: d,
                level,
                missing_from_a: kb.iter().filter(|x| ka.binary_search(x).is_err()).copied().collect(),
                missing_from_b: ka.iter().filter(|x| kb.binary_search(x).is_err()).copied().collect(),
                dominated_in_a: strictly_dominated(&ka, &kb),
                dominated_in_b: strictly_dominated(&kb, &ka),
            });
        }
    }
    FrontDiff { buckets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srgraph::build_sr_graph;
    use crate::topology::DiscretizationConfig;

    fn cfg() -> DiscretizationConfig {
        DiscretizationConfig::new(100, 10).unwrap()
    }

    #[test]
    fn single_node() {
        let g = Graph::new(["a"]);
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let f = brute_force_fronts(&sr, 0, 3, 1000, u64::MAX).unwrap();
        assert_eq!(f.front(3, 0).len(), 1);
        assert_eq!((f.front(3, 0)[0].delay_units, f.front(3, 0)[0].cost), (0, 0));
    }

    #[test]
    fn detour_does_not_improve() {
        let mut g = Graph::new(["u", "v"]);
        g.add_undirected(0, 1, 500, 3);
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let f = brute_force_fronts(&sr, 0, 2, 1000, u64::MAX).unwrap();
        for i in 1..=2 {
            let pairs: Vec<_> = f.front(i, 1).iter().map(|e| (e.delay_units, e.cost)).collect();
            assert_eq!(pairs, vec![(5, 3)]);
        }
        assert!(f.front(0, 1).is_empty());
    }

    #[test]
    fn guard_refuses_large_instances() {
        let g = Graph::with_node_count(11);
        let sr = SrGraph::from_pairs(11, cfg(), vec![Vec::new(); 121]);
        let _ = g;
        assert!(brute_force_fronts(&sr, 0, 2, 10, 10).is_err());
    }

    #[test]
    fn diff_reports_missing_entry() {
        let mut g = Graph::new(["u", "v"]);
        g.add_undirected(0, 1, 500, 3);
        g.add_undirected(0, 1, 100, 9);
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let a = brute_force_fronts(&sr, 0, 2, 1000, u64::MAX).unwrap();
        assert!(compare_fronts(&a, &a, DelayKey::Units).is_empty());
        let b = brute_force_fronts(&sr, 0, 2, 1000, 5).unwrap();
        let diff = compare_fronts(&a, &b, DelayKey::Units);
        assert_eq!(diff.buckets.len(), 2);
        assert_eq!(diff.buckets[0].missing_from_b, vec![(1, 9)]);
        assert!(diff.buckets[0].missing_from_a.is_empty());
    }
}
