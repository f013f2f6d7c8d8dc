//! BEST2COPE: fronts on multi-area topologies from per-area solves combined
//! through the area border routers.
//!
//! Every stub area and the backbone are solved independently on their
//! induced subgraphs, from every node of the region. A path towards a remote
//! destination is then assembled region by region. Where two node segments
//! meet at a border router and all best paths between their outer endpoints
//! cross that router with the same worst-case delay, they are merged into
//! one node segment (the merge correction). Both the merged and the plain
//! concatenation are kept, since truncating the merged delay can cost one
//! delay unit.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::encoder::{Segment, SegmentList};
use crate::solver::{best2cop, reconstruct_segments, FrontEntry, Origin, ParetoFront3D, SolverConfig, SolverError};
use crate::srgraph::{build_sr_graph, SegKind, SrGraph};
use crate::topology::{AreaId, DiscretizationConfig, MultiAreaGraph, NodeId, BACKBONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiAreaConfig {
    pub disc: DiscretizationConfig,
    /// Segment, delay and cost limits; `threads` bounds the per-area solves.
    pub solver: SolverConfig,
}

impl MultiAreaConfig {
    pub fn new(disc: DiscretizationConfig, solver: SolverConfig) -> Self {
        MultiAreaConfig { disc, solver }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MultiAreaError {
    #[error("area {0} induces a disconnected subgraph")]
    AreaDisconnected(AreaId),
    #[error("node {0} belongs to no area")]
    NoArea(NodeId),
    #[error("unsupported solver setting: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// A segment together with the distances it guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WeightedSegment {
    pub seg: Segment,
    pub delay_units: u64,
    pub delay_us: u64,
    pub cost: u64,
}

/// A segment path with its (segments, delay, cost) distance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PathCandidate {
    pub d0: u32,
    pub delay_units: u64,
    pub delay_us: u64,
    pub cost: u64,
    pub segments: Vec<WeightedSegment>,
}

impl PathCandidate {
    pub fn empty() -> Self {
        PathCandidate { d0: 0, delay_units: 0, delay_us: 0, cost: 0, segments: Vec::new() }
    }

    pub fn from_segments(segments: Vec<WeightedSegment>) -> Self {
        let mut c = PathCandidate::empty();
        for s in &segments {
            c.delay_units += s.delay_units;
            c.delay_us += s.delay_us;
            c.cost += s.cost;
        }
        c.d0 = segments.len() as u32;
        c.segments = segments;
        c
    }

    pub fn to_segment_list(&self) -> SegmentList {
        SegmentList {
            segments: self.segments.iter().map(|s| s.seg).collect(),
            delay_units: self.delay_units,
            delay_us: self.delay_us,
            cost: self.cost,
        }
    }
}

/// Fronts of one region (stub area or backbone) solved from one border
/// router, with global node ids in the segment lists.
#[derive(Debug, Clone, Serialize)]
pub struct AreaSummary {
    pub area: AreaId,
    pub abr: NodeId,
    /// Destination to its (segments, delay, cost) front.
    pub fronts: BTreeMap<NodeId, Vec<PathCandidate>>,
    pub entries: usize,
    /// Size of the JSON encoding, standing in for the wire message.
    pub bytes: usize,
}

/// Best IGP distance with the worst delay among best paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dist {
    cost: u64,
    us: u64,
}

impl Dist {
    const ZERO: Dist = Dist { cost: 0, us: 0 };

    fn plus(self, o: Dist) -> Dist {
        Dist { cost: self.cost + o.cost, us: self.us + o.us }
    }

    fn better(self, o: Dist) -> Dist {
        if self.cost < o.cost || (self.cost == o.cost && self.us > o.us) {
            self
        } else {
            o
        }
    }
}

/// One region's SR graph and its all-source fronts.
struct Region {
    nodes: Vec<NodeId>,
    local: HashMap<NodeId, NodeId>,
    sr: SrGraph,
    /// `paths[z][d]`: distinct front entries from local `z` to local `d`.
    paths: Vec<Vec<Vec<PathCandidate>>>,
}

impl Region {
    fn contains(&self, u: NodeId) -> bool {
        self.local.contains_key(&u)
    }

    fn dist(&self, u: NodeId, v: NodeId) -> Dist {
        if u == v {
            return Dist::ZERO;
        }
        let e = self.sr.node_seg(self.local[&u], self.local[&v]).expect("connected region");
        Dist { cost: e.cost, us: e.delay_us }
    }

    fn paths(&self, z: NodeId, d: NodeId) -> &[PathCandidate] {
        &self.paths[self.local[&z] as usize][self.local[&d] as usize]
    }
}

/// Per-phase timings and message accounting of one [`best2cope_with`] run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MultiAreaReport {
    pub area_solve_ms: f64,
    pub combine_ms: f64,
    /// Merged node segments produced by the correction.
    pub corrections: u64,
    /// Front entries shipped between regions.
    pub summary_entries: usize,
    pub summary_bytes: usize,
}

/// Region solves shared by every source of one topology.
pub struct MultiAreaContext<'a> {
    mg: &'a MultiAreaGraph,
    cfg: MultiAreaConfig,
    regions: BTreeMap<AreaId, Region>,
    area_solve_ms: f64,
    summary_entries: usize,
    summary_bytes: usize,
}

fn weighted(sr: &SrGraph, map: &[NodeId], seg: &Segment) -> WeightedSegment {
    let e = sr
        .edges(seg.from, seg.to)
        .iter()
        .find(|e| e.kind == seg.kind && e.link_index == seg.link_index)
        .expect("segment belongs to the SR graph");
    WeightedSegment {
        seg: Segment { from: map[seg.from as usize], to: map[seg.to as usize], ..*seg },
        delay_units: e.delay_units,
        delay_us: e.delay_us,
        cost: e.cost,
    }
}

/// Distinct entries of a front towards `d`, each with its segments.
fn distinct_paths(front: &ParetoFront3D, sr: &SrGraph, map: &[NodeId], d: NodeId) -> Vec<PathCandidate> {
    let mut seen: Vec<FrontEntry> = Vec::new();
    let mut out = Vec::new();
    for i in 0..=front.c0() {
        for e in front.front(i, d) {
            if seen.iter().any(|s| (s.delay_units, s.cost, s.segments) == (e.delay_units, e.cost, e.segments)) {
                continue;
            }
            seen.push(*e);
            let list = reconstruct_segments(front, Some(sr), d, e);
            out.push(PathCandidate::from_segments(list.segments.iter().map(|s| weighted(sr, map, s)).collect()));
        }
    }
    out
}

fn solve_region(
    mg: &MultiAreaGraph,
    area: AreaId,
    cfg: &MultiAreaConfig,
) -> Result<Region, MultiAreaError> {
    let nodes = mg.areas[&area].clone();
    let (sub, map) = mg.graph.induced_subgraph(&nodes);
    let sr = build_sr_graph(&sub, &cfg.disc).map_err(|_| MultiAreaError::AreaDisconnected(area))?;
    let solver = SolverConfig { threads: 1, ..cfg.solver };
    let paths = (0..nodes.len() as NodeId)
        .into_par_iter()
        .map(|z| {
            let front = best2cop(&sr, z, &solver)?;
            Ok((0..nodes.len() as NodeId).map(|d| distinct_paths(&front, &sr, &map, d)).collect())
        })
        .collect::<Result<Vec<_>, SolverError>>()?;
    let local = nodes.iter().enumerate().map(|(i, &u)| (u, i as NodeId)).collect();
    Ok(Region { nodes, local, sr, paths })
}

impl<'a> MultiAreaContext<'a> {
    /// Solves every region from every one of its nodes.
    pub fn new(mg: &'a MultiAreaGraph, cfg: MultiAreaConfig) -> Result<Self, MultiAreaError> {
        if cfg.solver.k_per_cell != 1 || cfg.solver.stress_full_iteration {
            return Err(MultiAreaError::Unsupported(
                "multi-area solves use one entry per cell and no stress mode".into(),
            ));
        }
        let start = Instant::now();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.solver.threads.max(1))
            .build()
            .map_err(|e| SolverError::Pool(e.to_string()))?;
        let regions = pool.install(|| {
            mg.areas
                .keys()
                .map(|&a| solve_region(mg, a, &cfg).map(|r| (a, r)))
                .collect::<Result<BTreeMap<_, _>, _>>()
        })?;
        let mut summary_entries = 0;
        let mut summary_bytes = 0;
        for (&a, region) in &regions {
            if a == BACKBONE {
                continue;
            }
            for row in &region.paths {
                for cands in row {
                    summary_entries += cands.len();
                    summary_bytes += serde_json::to_string(cands).map(|s| s.len()).unwrap_or(0);
                }
            }
        }
        Ok(MultiAreaContext {
            mg,
            cfg,
            regions,
            area_solve_ms: start.elapsed().as_secs_f64() * 1e3,
            summary_entries,
            summary_bytes,
        })
    }

    /// SR graph edges summed over all regions.
    pub fn sr_edge_count(&self) -> usize {
        self.regions.values().map(|r| r.sr.edge_count()).sum()
    }

    fn region(&self, area: AreaId) -> &Region {
        &self.regions[&area]
    }

    /// Fronts of `area` rooted at one of its border routers (or, for the
    /// backbone, at any backbone node).
    pub fn summary(&self, area: AreaId, abr: NodeId) -> Option<AreaSummary> {
        let region = self.regions.get(&area)?;
        if !region.contains(abr) {
            return None;
        }
        let fronts: BTreeMap<NodeId, Vec<PathCandidate>> =
            region.nodes.iter().map(|&d| (d, region.paths(abr, d).to_vec())).collect();
        let entries = fronts.values().map(Vec::len).sum();
        let bytes = serde_json::to_string(&fronts).map(|s| s.len()).unwrap_or(0);
        Some(AreaSummary { area, abr, fronts, entries, bytes })
    }

    /// Best distance between any two nodes, derived from the region solves
    /// through the border routers.
    fn global(&self, u: NodeId, w: NodeId) -> Dist {
        if u == w {
            return Dist::ZERO;
        }
        let mut shared: Option<Dist> = None;
        for region in self.regions.values() {
            if region.contains(u) && region.contains(w) {
                let d = region.dist(u, w);
                shared = Some(shared.map_or(d, |s| s.better(d)));
            }
        }
        if let Some(d) = shared {
            return d;
        }
        let interior = |x: NodeId| self.mg.home_area(x).filter(|_| !self.mg.is_backbone(x));
        if let Some(x) = interior(u) {
            let region = self.region(x);
            return self.mg.abrs[&x]
                .iter()
                .map(|&a| region.dist(u, a).plus(self.global(a, w)))
                .reduce(Dist::better)
                .expect("two border routers");
        }
        if let Some(y) = interior(w) {
            let region = self.region(y);
            return self.mg.abrs[&y]
                .iter()
                .map(|&b| self.global(u, b).plus(region.dist(b, w)))
                .reduce(Dist::better)
                .expect("two border routers");
        }
        self.region(BACKBONE).dist(u, w)
    }

    fn node_segment(&self, u: NodeId, w: NodeId) -> WeightedSegment {
        let d = self.global(u, w);
        WeightedSegment {
            seg: Segment::node(u, w),
            delay_units: self.cfg.disc.discretize(d.us),
            delay_us: d.us,
            cost: d.cost,
        }
    }

    /// Whether node segments `u -> j` and `j -> w` (with the given
    /// distances) can be merged into the node segment `u -> w`.
    fn mergeable(&self, u: NodeId, left: Dist, right: Dist, w: NodeId) -> bool {
        u != w && self.global(u, w) == left.plus(right)
    }
}

/// Sum of two candidates, or of a candidate, a middle segment and another
/// candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinedEntry {
    pub path: PathCandidate,
    /// Border router the two parts were joined at.
    pub abr: NodeId,
    /// Index in `path.segments` of the first segment after the junction.
    pub junction: usize,
    pub corrected: bool,
}

fn within(cfg: &SolverConfig, d0: u32, units: u64, cost: u64) -> bool {
    d0 as usize <= cfg.c0 && units <= cfg.c1_units && cost <= cfg.c2
}

/// All pairwise concatenations of paths ending at `abr` with paths starting
/// at `abr`, dropping those that exceed the limits.
pub fn cartesian_combine(
    to_abr: &[PathCandidate],
    from_abr: &[PathCandidate],
    abr: NodeId,
    cfg: &SolverConfig,
) -> Vec<CombinedEntry> {
    let mut out = Vec::new();
    for l in to_abr {
        for r in from_abr {
            let (d0, units, cost) = (l.d0 + r.d0, l.delay_units + r.delay_units, l.cost + r.cost);
            if !within(cfg, d0, units, cost) {
                continue;
            }
            let mut segments = l.segments.clone();
            segments.extend_from_slice(&r.segments);
            out.push(CombinedEntry {
                path: PathCandidate { d0, delay_units: units, delay_us: l.delay_us + r.delay_us, cost, segments },
                abr,
                junction: l.segments.len(),
                corrected: false,
            });
        }
    }
    out
}

/// Replaces the two node segments meeting at the junction by one node
/// segment when every best path between their outer endpoints crosses the
/// border router with the same worst-case delay. Returns `None` otherwise.
pub fn merge_correction(e: &CombinedEntry, ctx: &MultiAreaContext<'_>) -> Option<CombinedEntry> {
    let k = e.junction;
    if k == 0 || k >= e.path.segments.len() {
        return None;
    }
    let (l, r) = (e.path.segments[k - 1], e.path.segments[k]);
    if l.seg.kind != SegKind::Node || r.seg.kind != SegKind::Node || l.seg.to != e.abr || r.seg.from != e.abr {
        return None;
    }
    let left = Dist { cost: l.cost, us: l.delay_us };
    let right = Dist { cost: r.cost, us: r.delay_us };
    if !ctx.mergeable(l.seg.from, left, right, r.seg.to) {
        return None;
    }
    let merged = ctx.node_segment(l.seg.from, r.seg.to);
    let mut segments = e.path.segments[..k - 1].to_vec();
    segments.push(merged);
    segments.extend_from_slice(&e.path.segments[k + 1..]);
    Some(CombinedEntry { path: PathCandidate::from_segments(segments), abr: e.abr, junction: k - 1, corrected: true })
}

/// Candidates kept non-dominated on (segments, delay units, cost); among
/// equal ones the first offered stays.
#[derive(Default)]
struct Pareto3 {
    items: Vec<PathCandidate>,
}

impl Pareto3 {
    fn offer(&mut self, d0: u32, units: u64, cost: u64, make: impl FnOnce() -> PathCandidate) -> bool {
        if self.items.iter().any(|e| e.d0 <= d0 && e.delay_units <= units && e.cost <= cost) {
            return false;
        }
        self.items.retain(|e| !(d0 <= e.d0 && units <= e.delay_units && cost <= e.cost));
        self.items.push(make());
        true
    }

    fn offer_cand(&mut self, c: &PathCandidate) {
        self.offer(c.d0, c.delay_units, c.cost, || c.clone());
    }
}

/// Offers `a ⊕ mid ⊕ b` to `set` when it fits the limits.
fn offer_concat(
    set: &mut Pareto3,
    cfg: &SolverConfig,
    a: &PathCandidate,
    mid: Option<&WeightedSegment>,
    b: &PathCandidate,
) -> bool {
    let (m0, mu, mus, mc) = mid.map_or((0, 0, 0, 0), |m| (1, m.delay_units, m.delay_us, m.cost));
    let d0 = a.d0 + m0 + b.d0;
    let units = a.delay_units + mu + b.delay_units;
    let cost = a.cost + mc + b.cost;
    if !within(cfg, d0, units, cost) {
        return false;
    }
    set.offer(d0, units, cost, || {
        let mut segments = Vec::with_capacity(d0 as usize);
        segments.extend_from_slice(&a.segments);
        segments.extend(mid.copied());
        segments.extend_from_slice(&b.segments);
        PathCandidate { d0, delay_units: units, delay_us: a.delay_us + mus + b.delay_us, cost, segments }
    })
}

/// Solves every region and runs [`best2cope_with`] for one source.
pub fn best2cope(mg: &MultiAreaGraph, src: NodeId, cfg: &MultiAreaConfig) -> Result<ParetoFront3D, MultiAreaError> {
    let ctx = MultiAreaContext::new(mg, *cfg)?;
    best2cope_with(&ctx, src).map(|(f, _)| f)
}

/// Fronts from `src` to every node of the topology.
pub fn best2cope_with(
    ctx: &MultiAreaContext<'_>,
    src: NodeId,
) -> Result<(ParetoFront3D, MultiAreaReport), MultiAreaError> {
    let start = Instant::now();
    let mg = ctx.mg;
    let cfg = &ctx.cfg.solver;
    let n = mg.graph.node_count();
    if src as usize >= n {
        return Err(SolverError::UnknownSource(src).into());
    }
    let home = mg.home_area(src);
    if home.is_none() && !mg.is_backbone(src) {
        return Err(MultiAreaError::NoArea(src));
    }
    let bb = ctx.region(BACKBONE);
    let mut corrections = 0u64;
    let mut finals: Vec<Pareto3> = (0..n).map(|_| Pareto3::default()).collect();

    // Stage 1: into the backbone. reach[x] holds paths whose last waypoint
    // before continuing inside the backbone is x.
    let mut reach: BTreeMap<NodeId, Pareto3> = BTreeMap::new();
    if mg.is_backbone(src) {
        reach.entry(src).or_default().offer_cand(&PathCandidate::empty());
    }
    if let Some(x) = home {
        let xr = ctx.region(x);
        for &a in &mg.abrs[&x] {
            for c in xr.paths(src, a) {
                reach.entry(a).or_default().offer_cand(c);
            }
        }
        for &u in &xr.nodes {
            for &a in &mg.abrs[&x] {
                if u == a {
                    continue;
                }
                let left = xr.dist(u, a);
                for &t in &bb.nodes {
                    if t == a || t == u || !ctx.mergeable(u, left, bb.dist(a, t), t) {
                        continue;
                    }
                    let seg = ctx.node_segment(u, t);
                    let set = reach.entry(t).or_default();
                    for p in xr.paths(src, u) {
                        corrections += offer_concat(set, cfg, p, Some(&seg), &PathCandidate::empty()) as u64;
                    }
                }
            }
        }
    }
    let mut to_bb: BTreeMap<NodeId, Pareto3> = BTreeMap::new();
    for &b in &bb.nodes {
        let set = to_bb.entry(b).or_default();
        for (&x, r) in &reach {
            for p in &r.items {
                for c in bb.paths(x, b) {
                    offer_concat(set, cfg, p, None, c);
                }
            }
        }
    }

    // Stage 2: into every stub area, the home area included (out-and-back).
    for y in mg.stub_areas() {
        let yr = ctx.region(y);
        let mut entry: BTreeMap<NodeId, Pareto3> = BTreeMap::new();
        let mut left_nodes: Vec<(NodeId, &[PathCandidate])> = Vec::new();
        for &u in &bb.nodes {
            left_nodes.push((u, to_bb[&u].items.as_slice()));
        }
        if let Some(x) = home.filter(|&x| x != y) {
            let xr = ctx.region(x);
            for &u in &xr.nodes {
                if !mg.is_backbone(u) {
                    left_nodes.push((u, xr.paths(src, u)));
                }
            }
        }
        for &b in &mg.abrs[&y] {
            let set = entry.entry(b).or_default();
            for c in &to_bb[&b].items {
                set.offer_cand(c);
            }
        }
        for &b in &mg.abrs[&y] {
            for &(u, prefixes) in &left_nodes {
                if u == b || prefixes.is_empty() {
                    continue;
                }
                let left = ctx.global(u, b);
                for &z in &yr.nodes {
                    if z == b || z == u || !ctx.mergeable(u, left, yr.dist(b, z), z) {
                        continue;
                    }
                    let seg = ctx.node_segment(u, z);
                    let set = entry.entry(z).or_default();
                    for p in prefixes {
                        corrections += offer_concat(set, cfg, p, Some(&seg), &PathCandidate::empty()) as u64;
                    }
                }
            }
        }
        for &d in &yr.nodes {
            let set = &mut finals[d as usize];
            for (&z, r) in &entry {
                let tails = yr.paths(z, d);
                for p in &r.items {
                    for c in tails {
                        offer_concat(set, cfg, p, None, c);
                    }
                }
            }
        }
    }

    for (&b, set) in &to_bb {
        for c in &set.items {
            finals[b as usize].offer_cand(c);
        }
    }
    if let Some(x) = home {
        let xr = ctx.region(x);
        for &d in &xr.nodes {
            for c in xr.paths(src, d) {
                finals[d as usize].offer_cand(c);
            }
        }
    }

    let levels = (0..=cfg.c0)
        .map(|i| finals.iter().map(|set| front_at(set, i)).collect())
        .collect();
    let front = ParetoFront3D::from_explicit(src, n, levels);
    let report = MultiAreaReport {
        area_solve_ms: ctx.area_solve_ms,
        combine_ms: start.elapsed().as_secs_f64() * 1e3,
        corrections,
        summary_entries: ctx.summary_entries,
        summary_bytes: ctx.summary_bytes,
    };
    Ok((front, report))
}

/// 2-D front of the candidates using at most `i` segments.
fn front_at(set: &Pareto3, i: usize) -> Vec<(FrontEntry, SegmentList)> {
    let mut within: Vec<&PathCandidate> = set.items.iter().filter(|c| c.d0 as usize <= i).collect();
    within.sort_by_key(|c| (c.delay_units, c.cost, c.d0));
    let mut out: Vec<(FrontEntry, SegmentList)> = Vec::new();
    for c in within {
        if out.last().is_none_or(|(l, _)| c.cost < l.cost) {
            let e = FrontEntry {
                delay_units: c.delay_units,
                delay_us: c.delay_us,
                cost: c.cost,
                segments: c.d0,
                origin: Origin::Source,
            };
            out.push((e, c.to_segment_list()));
        }
    }
    out
}

/// Summaries exchanged by every border router: its stub area's fronts and
/// its backbone fronts, keyed by (area, router).
pub fn solve_area_fronts(
    mg: &MultiAreaGraph,
    cfg: &MultiAreaConfig,
) -> Result<BTreeMap<(AreaId, NodeId), AreaSummary>, MultiAreaError> {
    let ctx = MultiAreaContext::new(mg, *cfg)?;
    let mut out = BTreeMap::new();
    for (&area, pair) in &mg.abrs {
        for &abr in pair {
            for a in [area, BACKBONE] {
                if let Some(s) = ctx.summary(a, abr) {
                    out.insert((a, abr), s);
                }
            }
        }
    }
    Ok(out)
}
