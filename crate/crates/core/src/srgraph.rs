//! Per-source ECMP shortest-path DAGs and the segment-routing graph G′ whose
//! edges are node and adjacency segments.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{DiscretizationConfig, Graph, NodeId};

/// Cost of unreachable nodes in [`EcmpDag::cost_to`].
pub const UNREACHABLE: u64 = u64::MAX;

/// Best-cost DAG rooted at one node, with the worst delay over all equal-cost
/// best paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcmpDag {
    pub root: NodeId,
    /// Best IGP distance, [`UNREACHABLE`] if none.
    pub cost_to: Vec<u64>,
    /// Worst delay over all best-cost paths, in microseconds.
    pub max_delay_us: Vec<u64>,
    /// `max_delay_us` truncated to delay units.
    pub max_delay_units: Vec<u64>,
    /// Incoming `(predecessor, link_index)` pairs lying on a best-cost path.
    pub dag_parents: Vec<Vec<(NodeId, u32)>>,
}

impl EcmpDag {
    pub fn reachable(&self, v: NodeId) -> bool {
        self.cost_to[v as usize] != UNREACHABLE
    }
}

/// Dijkstra on IGP cost, then a sweep in settle order that propagates the
/// maximum delay over every best-cost parent.
pub fn compute_multimetric_spt(g: &Graph, cfg: &DiscretizationConfig, root: NodeId) -> EcmpDag {
    let n = g.node_count();
    let mut cost_to = vec![UNREACHABLE; n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    cost_to[root as usize] = 0;
    heap.push(Reverse((0u64, root)));
    while let Some(Reverse((c, u))) = heap.pop() {
        if settled[u as usize] {
            continue;
        }
        settled[u as usize] = true;
        order.push(u);
        for l in g.out_links(u) {
            let nc = c + l.cost;
            if nc < cost_to[l.dst as usize] {
                cost_to[l.dst as usize] = nc;
                heap.push(Reverse((nc, l.dst)));
            }
        }
    }

    let mut dag_parents: Vec<Vec<(NodeId, u32)>> = vec![Vec::new(); n];
    let mut parent_delays: Vec<Vec<u64>> = vec![Vec::new(); n];
    for l in g.links() {
        let cu = cost_to[l.src as usize];
        if cu != UNREACHABLE && l.dst != root && cu + l.cost == cost_to[l.dst as usize] {
            dag_parents[l.dst as usize].push((l.src, l.link_index));
            parent_delays[l.dst as usize].push(l.delay_us);
        }
    }
    let mut max_delay_us = vec![0u64; n];
    for &v in &order {
        let best = dag_parents[v as usize]
            .iter()
            .zip(&parent_delays[v as usize])
            .map(|(&(u, _), &d)| max_delay_us[u as usize] + d)
            .max()
            .unwrap_or(0);
        max_delay_us[v as usize] = best;
    }
    let max_delay_units = max_delay_us.iter().map(|&d| cfg.discretize(d)).collect();
    EcmpDag { root, cost_to, max_delay_us, max_delay_units, dag_parents }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegKind {
    /// Follows all best-IGP paths to the target.
    #[serde(rename = "node")]
    Node,
    /// Forces one specific link.
    #[serde(rename = "adj")]
    Adj,
}

/// One edge of G′.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentEdge {
    pub kind: SegKind,
    pub delay_units: u64,
    /// Exact delay in microseconds (worst case over ECMP for node segments).
    pub delay_us: u64,
    pub cost: u64,
    /// Ordinal of the physical link, for adjacency segments.
    pub link_index: Option<u32>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SrGraphError {
    #[error("graph is disconnected: {from} cannot reach {to}")]
    Disconnected { from: String, to: String },
}

/// Complete multigraph of segments, stored as one flat edge list indexed by
/// ordered node pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrGraph {
    n: usize,
    disc: DiscretizationConfig,
    offsets: Vec<usize>,
    edges: Vec<SegmentEdge>,
}

impl SrGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn discretization(&self) -> &DiscretizationConfig {
        &self.disc
    }

    /// Γ carried over from the discretization.
    pub fn gamma_capacity(&self) -> u64 {
        self.disc.gamma_capacity()
    }

    /// E′(u, v): the node segment first, then surviving adjacency segments
    /// by increasing delay.
    #[inline]
    pub fn edges(&self, u: NodeId, v: NodeId) -> &[SegmentEdge] {
        let k = u as usize * self.n + v as usize;
        &self.edges[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn node_seg(&self, u: NodeId, v: NodeId) -> Option<&SegmentEdge> {
        self.edges(u, v).first().filter(|e| e.kind == SegKind::Node)
    }

    /// |E′|.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Average number of segments per ordered pair, L = |E′| / |V|².
    pub fn parallelism(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.edges.len() as f64 / (self.n * self.n) as f64
        }
    }

    pub fn adjacency_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == SegKind::Adj).count()
    }

    /// Debug dump using the topology link schema plus segment kind.
    pub fn to_json(&self, g: &Graph) -> String {
        #[derive(Serialize)]
        struct Edge<'a> {
            src: &'a str,
            dst: &'a str,
            kind: SegKind,
            delay_units: u64,
            delay_us: u64,
            cost: u64,
            #[serde(skip_serializing_if = "Option::is_none")]
            link_index: Option<u32>,
        }
        #[derive(Serialize)]
        struct Dump<'a> {
            c1_ms: u64,
            gamma: u64,
            nodes: &'a [String],
            edges: Vec<Edge<'a>>,
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for u in 0..self.n as NodeId {
            for v in 0..self.n as NodeId {
                for e in self.edges(u, v) {
                    edges.push(Edge {
                        src: g.name(u),
                        dst: g.name(v),
                        kind: e.kind,
                        delay_units: e.delay_units,
                        delay_us: e.delay_us,
                        cost: e.cost,
                        link_index: e.link_index,
                    });
                }
            }
        }
        let dump = Dump { c1_ms: self.disc.c1_ms, gamma: self.disc.gamma, nodes: g.names(), edges };
        serde_json::to_string_pretty(&dump).expect("SR graph serialization cannot fail")
    }

    /// Assembles an SR graph from explicit per-pair edge lists; `pairs` is
    /// indexed by `u * n + v`. Intended for hand-built fixtures.
    pub fn from_pairs(n: usize, disc: DiscretizationConfig, pairs: Vec<Vec<SegmentEdge>>) -> Self {
        assert_eq!(pairs.len(), n * n);
        let mut offsets = Vec::with_capacity(n * n + 1);
        let mut edges = Vec::new();
        offsets.push(0);
        for list in pairs {
            edges.extend(list);
            offsets.push(edges.len());
        }
        SrGraph { n, disc, offsets, edges }
    }
}

/// Weakly better or equal on both discretized delay and cost.
fn covers(a: &SegmentEdge, b: &SegmentEdge) -> bool {
    a.delay_units <= b.delay_units && a.cost <= b.cost
}

/// Segments from `u` to every node: one node segment per reachable pair and
/// each physical link not dominated by it nor by another kept link.
fn segments_from(g: &Graph, cfg: &DiscretizationConfig, u: NodeId) -> Result<(Vec<usize>, Vec<SegmentEdge>), SrGraphError> {
    let n = g.node_count();
    let dag = compute_multimetric_spt(g, cfg, u);
    let mut by_dst: Vec<Vec<SegmentEdge>> = vec![Vec::new(); n];
    for l in g.out_links(u) {
        if l.dst != u {
            by_dst[l.dst as usize].push(SegmentEdge {
                kind: SegKind::Adj,
                delay_units: cfg.discretize(l.delay_us),
                delay_us: l.delay_us,
                cost: l.cost,
                link_index: Some(l.link_index),
            });
        }
    }
    let mut counts = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for v in 0..n as NodeId {
        if v == u {
            counts.push(0);
            continue;
        }
        if !dag.reachable(v) {
            return Err(SrGraphError::Disconnected { from: g.name(u).into(), to: g.name(v).into() });
        }
        let node = SegmentEdge {
            kind: SegKind::Node,
            delay_units: dag.max_delay_units[v as usize],
            delay_us: dag.max_delay_us[v as usize],
            cost: dag.cost_to[v as usize],
            link_index: None,
        };
        let start = edges.len();
        edges.push(node);
        let candidates = &mut by_dst[v as usize];
        candidates.sort_by_key(|c| (c.delay_units, c.cost, c.delay_us, c.link_index));
        for c in candidates.iter() {
            if covers(&node, c) || covers(&edges[edges.len() - 1], c) {
                continue;
            }
            edges.push(*c);
        }
        counts.push(edges.len() - start);
    }
    Ok((counts, edges))
}

/// Builds G′ on the current rayon pool. Requires a strongly connected graph.
pub fn build_sr_graph(g: &Graph, cfg: &DiscretizationConfig) -> Result<SrGraph, SrGraphError> {
    let n = g.node_count();
    let per_source: Vec<_> = (0..n as NodeId)
        .into_par_iter()
        .map(|u| segments_from(g, cfg, u))
        .collect::<Result<_, _>>()?;
    let total: usize = per_source.iter().map(|(_, e)| e.len()).sum();
    let mut offsets = Vec::with_capacity(n * n + 1);
    let mut edges = Vec::with_capacity(total);
    offsets.push(0);
    for (counts, list) in per_source {
        for c in counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        edges.extend(list);
    }
    Ok(SrGraph { n, disc: *cfg, offsets, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::random::{erdos_renyi, RandomGraphParams};

    fn cfg() -> DiscretizationConfig {
        DiscretizationConfig::new(100, 10).unwrap()
    }

    #[test]
    fn isolated_root() {
        let mut g = Graph::new(["r", "a"]);
        g.add_link(1, 0, 10, 1);
        let dag = compute_multimetric_spt(&g, &cfg(), 0);
        assert_eq!(dag.cost_to, vec![0, UNREACHABLE]);
    }

    #[test]
    fn diamond_takes_worst_delay() {
        // u -> {a, b} -> v, both cost 2, delays 2 and 7 units.
        let mut g = Graph::new(["u", "a", "b", "v"]);
        g.add_link(0, 1, 100, 1);
        g.add_link(1, 3, 100, 1);
        g.add_link(0, 2, 300, 1);
        g.add_link(2, 3, 400, 1);
        let dag = compute_multimetric_spt(&g, &cfg(), 0);
        assert_eq!(dag.cost_to[3], 2);
        assert_eq!(dag.max_delay_units[3], 7);
        assert_eq!(dag.dag_parents[3], vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn equal_adjacency_is_dropped() {
        let mut g = Graph::new(["u", "v"]);
        g.add_undirected(0, 1, 500, 3);
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        assert_eq!(
            sr.edges(0, 1),
            [SegmentEdge { kind: SegKind::Node, delay_units: 5, delay_us: 500, cost: 3, link_index: None }]
        );
        assert!(sr.edges(0, 0).is_empty());
    }

    #[test]
    fn faster_parallel_link_survives() {
        let mut g = Graph::new(["u", "v"]);
        g.add_undirected(0, 1, 900, 1);
        g.add_undirected(0, 1, 200, 4);
        g.add_undirected(0, 1, 200, 4);
        g.add_undirected(0, 1, 950, 5);
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let e = sr.edges(0, 1);
        assert_eq!(e.len(), 2);
        assert_eq!(e[1].kind, SegKind::Adj);
        assert_eq!((e[1].delay_units, e[1].cost, e[1].link_index), (2, 4, Some(1)));
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::new(["u", "v"]);
        assert!(matches!(build_sr_graph(&g, &cfg()), Err(SrGraphError::Disconnected { .. })));
    }

    #[test]
    fn rebuild_is_identical() {
        let mut p = RandomGraphParams::evaluation(30);
        p.parallel_prob = 0.3;
        let g = erdos_renyi(&p, 11);
        let a = build_sr_graph(&g, &cfg()).unwrap();
        let b = build_sr_graph(&g, &cfg()).unwrap();
        assert_eq!(a, b);
        assert!(a.parallelism() >= 30.0 * 29.0 / 900.0);
    }
}
