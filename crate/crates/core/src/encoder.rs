//! Conversion of raw-graph paths into minimal segment lists, plus the
//! incremental encoder state and the dominance rule used by label-correcting
//! searches on the raw graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::srgraph::{SegKind, SrGraph};
use crate::topology::{Graph, Link, NodeId};

/// One routing instruction: follow best paths to `to` (node segment) or take
/// one specific link (adjacency segment).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegKind,
    pub from: NodeId,
    pub to: NodeId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub link_index: Option<u32>,
}

impl Segment {
    pub fn node(from: NodeId, to: NodeId) -> Self {
        Segment { kind: SegKind::Node, from, to, link_index: None }
    }

    pub fn adj(from: NodeId, to: NodeId, link_index: u32) -> Self {
        Segment { kind: SegKind::Adj, from, to, link_index: Some(link_index) }
    }
}

/// Ordered segments and the distances they guarantee.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SegmentList {
    pub segments: Vec<Segment>,
    pub delay_units: u64,
    pub delay_us: u64,
    pub cost: u64,
}

impl SegmentList {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Consecutive segments share their junction node.
    pub fn is_chained(&self) -> bool {
        self.segments.windows(2).all(|w| w[0].to == w[1].from)
    }

    pub fn push(&mut self, seg: Segment, delay_units: u64, delay_us: u64, cost: u64) {
        self.segments.push(seg);
        self.delay_units += delay_units;
        self.delay_us += delay_us;
        self.cost += cost;
    }
}

/// A path in the raw graph: node sequence plus, per hop, the ordinal of the
/// parallel link taken.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawPath {
    pub nodes: Vec<NodeId>,
    pub links: Vec<u32>,
}

impl RawPath {
    /// Path using the first parallel link on every hop.
    pub fn new(nodes: Vec<NodeId>) -> Self {
        let links = vec![0; nodes.len().saturating_sub(1)];
        RawPath { nodes, links }
    }

    pub fn with_links(nodes: Vec<NodeId>, links: Vec<u32>) -> Self {
        assert_eq!(links.len() + 1, nodes.len().max(1), "one link ordinal per hop");
        RawPath { nodes, links }
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("path needs at least two nodes")]
    TooShort,
    #[error("no link #{link_index} from node {from} to node {to}")]
    MissingLink { from: NodeId, to: NodeId, link_index: u32 },
}

/// Exact worst-case delay and cost of the node segment `a -> b`; zero for
/// `a == b`.
fn sr_weights(sr: &SrGraph, a: NodeId, b: NodeId) -> (u64, u64, u64) {
    if a == b {
        return (0, 0, 0);
    }
    let e = sr.node_seg(a, b).expect("SR graph lacks a node segment");
    (e.delay_units, e.delay_us, e.cost)
}

/// Whether a node segment anchored at `anchor` that currently ends at
/// `link.src` still encodes the path after appending `link`: the link lies on
/// the anchor's best-cost DAG and the worst-case delay grows by exactly the
/// link's delay.
pub fn node_seg_extends(sr: &SrGraph, anchor: NodeId, link: &Link) -> bool {
    if link.dst == anchor {
        return false;
    }
    let (_, d_x, c_x) = sr_weights(sr, anchor, link.src);
    let (_, d_y, c_y) = sr_weights(sr, anchor, link.dst);
    c_x + link.cost == c_y && d_x + link.delay_us == d_y
}

fn hop<'g>(g: &'g Graph, p: &RawPath, k: usize) -> Result<&'g Link, EncodeError> {
    let (from, to, link_index) = (p.nodes[k], p.nodes[k + 1], p.links[k]);
    g.find_link(from, to, link_index)
        .ok_or(EncodeError::MissingLink { from, to, link_index })
}

/// Longest prefix of `p[start..]` covered by one segment; returns the
/// segment and the index of the node where it ends.
pub fn one_seg_longest_prefix(
    g: &Graph,
    sr: &SrGraph,
    p: &RawPath,
    start: usize,
) -> Result<(Segment, usize), EncodeError> {
    if p.nodes.len() < start + 2 {
        return Err(EncodeError::TooShort);
    }
    let x0 = p.nodes[start];
    let first = hop(g, p, start)?;
    if !node_seg_extends(sr, x0, first) {
        return Ok((Segment::adj(x0, first.dst, first.link_index), start + 1));
    }
    let mut end = start + 1;
    while end + 1 < p.nodes.len() {
        let l = hop(g, p, end)?;
        if !node_seg_extends(sr, x0, l) {
            break;
        }
        end += 1;
    }
    Ok((Segment::node(x0, p.nodes[end]), end))
}

/// Greedy minimal encoding of a raw path.
pub fn encode_path(g: &Graph, sr: &SrGraph, p: &RawPath) -> Result<SegmentList, EncodeError> {
    if p.nodes.len() < 2 {
        return Err(EncodeError::TooShort);
    }
    let disc = sr.discretization();
    let mut out = SegmentList::default();
    let mut pos = 0;
    while pos + 1 < p.nodes.len() {
        let (seg, end) = one_seg_longest_prefix(g, sr, p, pos)?;
        match seg.kind {
            SegKind::Node => {
                let (units, us, cost) = sr_weights(sr, seg.from, seg.to);
                out.push(seg, units, us, cost);
            }
            SegKind::Adj => {
                let l = hop(g, p, pos)?;
                out.push(seg, disc.discretize(l.delay_us), l.delay_us, l.cost);
            }
        }
        pos = end;
    }
    Ok(out)
}

/// Encoding state of a raw-graph path prefix, extendable one link at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncoderState {
    /// Node the prefix ends at.
    pub node: NodeId,
    /// Start of the open node segment, or `node` when no segment is open.
    pub anchor: NodeId,
    /// Kind of the last segment; `None` for the empty prefix.
    pub last_kind: Option<SegKind>,
    /// Segments used, the open one included (d0).
    pub segments: u32,
    closed_units: u64,
    closed_us: u64,
    closed_cost: u64,
    /// Guaranteed totals of the whole prefix.
    pub delay_units: u64,
    pub delay_us: u64,
    pub cost: u64,
}

impl EncoderState {
    pub fn start(src: NodeId) -> Self {
        EncoderState {
            node: src,
            anchor: src,
            last_kind: None,
            segments: 0,
            closed_units: 0,
            closed_us: 0,
            closed_cost: 0,
            delay_units: 0,
            delay_us: 0,
            cost: 0,
        }
    }

    /// State after appending `link`, which must leave `self.node`.
    pub fn extend(&self, sr: &SrGraph, link: &Link) -> EncoderState {
        debug_assert_eq!(link.src, self.node);
        let mut next = *self;
        next.node = link.dst;
        if self.last_kind == Some(SegKind::Node) && node_seg_extends(sr, self.anchor, link) {
            let (u, d, c) = sr_weights(sr, self.anchor, link.dst);
            next.delay_units = self.closed_units + u;
            next.delay_us = self.closed_us + d;
            next.cost = self.closed_cost + c;
            return next;
        }
        // Close the current segment (if any) and open a new one at link.src.
        next.closed_units = self.delay_units;
        next.closed_us = self.delay_us;
        next.closed_cost = self.cost;
        next.segments += 1;
        if node_seg_extends(sr, link.src, link) {
            let (u, d, c) = sr_weights(sr, link.src, link.dst);
            next.anchor = link.src;
            next.last_kind = Some(SegKind::Node);
            next.delay_units = next.closed_units + u;
            next.delay_us = next.closed_us + d;
            next.cost = next.closed_cost + c;
        } else {
            let units = sr.discretization().discretize(link.delay_us);
            next.anchor = link.dst;
            next.last_kind = Some(SegKind::Adj);
            next.closed_units += units;
            next.closed_us += link.delay_us;
            next.closed_cost += link.cost;
            next.delay_units = next.closed_units;
            next.delay_us = next.closed_us;
            next.cost = next.closed_cost;
        }
        next
    }

    fn open_node_seg(&self) -> bool {
        self.last_kind == Some(SegKind::Node)
    }
}

/// Whether `q` makes `p` (both ending at the same node) useless for a
/// search: `q` is no worse on segments, delay and cost, and `p` has no
/// pending node segment that could absorb future links for free where `q`
/// cannot.
pub fn extended_dominates(p: &EncoderState, q: &EncoderState) -> bool {
    let weakly = q.segments <= p.segments && q.delay_units <= p.delay_units && q.cost <= p.cost;
    if !weakly {
        return false;
    }
    let escape = q.segments == p.segments
        && p.open_node_seg()
        && (q.anchor != p.anchor || !q.open_node_seg());
    !escape
}

/// Independent check of the encoding definition: every node segment covers
/// a sub-path lying on its source's best-cost DAG with worst-case delay not
/// exceeding the sub-path's delay, every adjacency segment covers one link,
/// and the segments tile the path.
pub fn is_valid_encoding(g: &Graph, sr: &SrGraph, p: &RawPath, segs: &[Segment]) -> bool {
    let mut pos = 0;
    for s in segs {
        if pos >= p.hops() || p.nodes[pos] != s.from {
            return false;
        }
        match s.kind {
            SegKind::Adj => {
                if p.nodes[pos + 1] != s.to || Some(p.links[pos]) != s.link_index {
                    return false;
                }
                pos += 1;
            }
            SegKind::Node => {
                let Some(end) = (pos + 1..p.nodes.len()).find(|&k| p.nodes[k] == s.to) else {
                    return false;
                };
                if !sub_path_is_node_segment(g, sr, p, pos, end) {
                    return false;
                }
                pos = end;
            }
        }
    }
    pos == p.hops()
}

/// Definition check for one node segment over `p.nodes[from..=to]`, written
/// against total path weights rather than the incremental identity.
pub fn sub_path_is_node_segment(g: &Graph, sr: &SrGraph, p: &RawPath, from: usize, to: usize) -> bool {
    let a = p.nodes[from];
    let b = p.nodes[to];
    if a == b {
        return false;
    }
    let mut delay = 0;
    let mut cost = 0;
    for k in from..to {
        let Some(l) = g.find_link(p.nodes[k], p.nodes[k + 1], p.links[k]) else {
            return false;
        };
        delay += l.delay_us;
        cost += l.cost;
    }
    let (_, sr_delay, sr_cost) = sr_weights(sr, a, b);
    // On a best-cost path every prefix is a best-cost path too.
    let mut prefix_cost = 0;
    for k in from..to {
        let l = g.find_link(p.nodes[k], p.nodes[k + 1], p.links[k]).unwrap();
        prefix_cost += l.cost;
        if prefix_cost != sr_weights(sr, a, p.nodes[k + 1]).2 {
            return false;
        }
    }
    cost == sr_cost && sr_delay <= delay
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srgraph::build_sr_graph;
    use crate::topology::DiscretizationConfig;

    fn cfg() -> DiscretizationConfig {
        DiscretizationConfig::new(100, 10).unwrap()
    }

    /// Diamond u -> {a, b} -> v, both branches cost 2; branch via b is slower.
    /// Plus an expensive shortcut u -> v.
    fn diamond() -> Graph {
        let mut g = Graph::new(["u", "a", "b", "v", "w"]);
        g.add_undirected(0, 1, 100, 1);
        g.add_undirected(1, 3, 100, 1);
        g.add_undirected(0, 2, 300, 1);
        g.add_undirected(2, 3, 400, 1);
        g.add_undirected(3, 4, 100, 1);
        g.add_undirected(0, 3, 50, 9);
        g
    }

    #[test]
    fn whole_path_one_node_segment() {
        let g = diamond();
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let p = RawPath::new(vec![0, 2, 3, 4]);
        let s = encode_path(&g, &sr, &p).unwrap();
        assert_eq!(s.segments, vec![Segment::node(0, 4)]);
        assert_eq!((s.delay_us, s.cost), (800, 3));
    }

    #[test]
    fn off_dag_first_link_is_adjacency() {
        let g = diamond();
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let p = RawPath::new(vec![0, 3]);
        let (seg, end) = one_seg_longest_prefix(&g, &sr, &p, 0).unwrap();
        assert_eq!((seg, end), (Segment::adj(0, 3, 0), 1));
    }

    #[test]
    fn fast_branch_breaks_node_segment() {
        // u -> a -> v is on the DAG but faster than the worst case, so the
        // node segment from u stops at a.
        let g = diamond();
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let p = RawPath::new(vec![0, 1, 3, 4]);
        let s = encode_path(&g, &sr, &p).unwrap();
        assert_eq!(s.segments, vec![Segment::node(0, 1), Segment::node(1, 4)]);
        assert!(is_valid_encoding(&g, &sr, &p, &s.segments));
        for k in 2..4 {
            assert!(!sub_path_is_node_segment(&g, &sr, &p, 0, k));
        }
    }

    #[test]
    fn missing_link_rejected() {
        let g = diamond();
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let err = encode_path(&g, &sr, &RawPath::new(vec![1, 2])).unwrap_err();
        assert!(matches!(err, EncodeError::MissingLink { .. }));
        assert_eq!(encode_path(&g, &sr, &RawPath::new(vec![1])), Err(EncodeError::TooShort));
    }

    #[test]
    fn incremental_state_matches_encoding() {
        let g = diamond();
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        for nodes in [vec![0, 1, 3, 4], vec![0, 3, 4], vec![4, 3, 2, 0, 1]] {
            let p = RawPath::new(nodes.clone());
            let mut st = EncoderState::start(nodes[0]);
            for k in 0..p.hops() {
                st = st.extend(&sr, g.find_link(nodes[k], nodes[k + 1], 0).unwrap());
                let prefix = RawPath::new(nodes[..=k + 1].to_vec());
                let enc = encode_path(&g, &sr, &prefix).unwrap();
                assert_eq!(st.segments as usize, enc.len());
                assert_eq!((st.delay_units, st.delay_us, st.cost), (enc.delay_units, enc.delay_us, enc.cost));
                assert_eq!(st.last_kind, enc.segments.last().map(|s| s.kind));
            }
        }
    }

    #[test]
    fn dominance_escape_clause() {
        let g = diamond();
        let sr = build_sr_graph(&g, &cfg()).unwrap();
        let a = EncoderState::start(0).extend(&sr, g.find_link(0, 1, 0).unwrap());
        assert!(extended_dominates(&a, &a));
        let mut better = a;
        better.anchor = 2;
        better.delay_units = 0;
        better.cost = 0;
        assert!(!extended_dominates(&a, &better));
        better.segments = 0;
        assert!(extended_dominates(&a, &better));
    }
}
