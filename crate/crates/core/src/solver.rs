//! BEST2COP: segment-bounded Bellman–Ford sweep over the SR graph keeping,
//! for every destination, a delay-indexed array of best costs from which the
//! Pareto fronts are read off after each iteration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{Segment, SegmentList};
use crate::srgraph::{SegKind, SrGraph};
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Maximum number of segments (MSD).
    pub c0: usize,
    /// Delay constraint in delay units, at most Γ.
    pub c1_units: u64,
    /// Cost constraint.
    pub c2: u64,
    pub threads: usize,
    /// Exact (delay, cost) entries kept per delay cell. With more than one,
    /// cells are indexed by the truncated exact delay of the whole path.
    pub k_per_cell: usize,
    /// Extend from every cell of every node at every iteration.
    pub stress_full_iteration: bool,
}

impl SolverConfig {
    pub fn new(c0: usize, c1_units: u64) -> Self {
        SolverConfig {
            c0,
            c1_units,
            c2: u64::MAX,
            threads: 1,
            k_per_cell: 1,
            stress_full_iteration: false,
        }
    }

    /// Defaults for an SR graph: MSD 10 and the full Γ as delay constraint.
    pub fn for_graph(sr: &SrGraph) -> Self {
        SolverConfig::new(10, sr.gamma_capacity())
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_cost_limit(mut self, c2: u64) -> Self {
        self.c2 = c2;
        self
    }

    pub fn with_k_per_cell(mut self, k: usize) -> Self {
        self.k_per_cell = k;
        self
    }

    pub fn with_stress(mut self, on: bool) -> Self {
        self.stress_full_iteration = on;
        self
    }

    pub fn validate(&self, sr: &SrGraph) -> Result<(), SolverError> {
        if self.c0 == 0 {
            return Err(SolverError::Config("c0 must be at least 1".into()));
        }
        if self.c1_units == 0 || self.c1_units > sr.gamma_capacity() {
            return Err(SolverError::Config(format!(
                "c1_units must be in 1..={} (got {})",
                sr.gamma_capacity(),
                self.c1_units
            )));
        }
        if self.k_per_cell == 0 || self.k_per_cell > u8::MAX as usize {
            return Err(SolverError::Config("k_per_cell must be in 1..=255".into()));
        }
        if self.threads == 0 {
            return Err(SolverError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("source node {0} does not exist")]
    UnknownSource(NodeId),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// How a front entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    /// The empty path at the source.
    Source,
    /// Extension of `front(prev_level, prev_node)[prev_pos]` by the
    /// `edge`-th segment of E′(prev_node, this destination).
    Step { prev_node: NodeId, edge: u32, prev_level: u32, prev_pos: u32 },
    /// Segment list stored in the front itself.
    Explicit(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrontEntry {
    pub delay_units: u64,
    /// Exact delay guaranteed by the segment list, in microseconds.
    pub delay_us: u64,
    pub cost: u64,
    /// Number of segments of the path behind this entry.
    pub segments: u32,
    pub origin: Origin,
}

/// Work counters of one solve.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Iterations actually run.
    pub iterations: usize,
    /// Edge/entry relaxation attempts, per iteration.
    pub extensions: Vec<u64>,
    /// Largest ExtendList, in entries.
    pub peak_extend_entries: usize,
    pub merge_scans: u64,
    pub dense_scans: u64,
    /// Candidates lost to full cells although no kept entry dominates them
    /// on exact delay and cost.
    pub cell_overflows: u64,
}

impl SolveStats {
    pub fn total_extensions(&self) -> u64 {
        self.extensions.iter().sum()
    }
}

/// `front(i, d)`: non-dominated (delay, cost) pairs of paths from the source
/// to `d` using at most `i` segments, by increasing delay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoFront3D {
    src: NodeId,
    c0: usize,
    n: usize,
    levels: Vec<Vec<Vec<FrontEntry>>>,
    explicit: Vec<SegmentList>,
    #[serde(skip)]
    pub stats: SolveStats,
}

impl ParetoFront3D {
    /// Builds a front whose entries carry their own segment lists.
    /// `levels[i][d]` lists `(entry, segments)` by increasing delay; the
    /// entry origins are overwritten.
    pub fn from_explicit(src: NodeId, n: usize, levels: Vec<Vec<Vec<(FrontEntry, SegmentList)>>>) -> Self {
        let c0 = levels.len().saturating_sub(1);
        let mut explicit = Vec::new();
        let levels = levels
            .into_iter()
            .map(|level| {
                assert_eq!(level.len(), n);
                level
                    .into_iter()
                    .map(|bucket| {
                        bucket
                            .into_iter()
                            .map(|(mut e, segs)| {
                                e.origin = Origin::Explicit(explicit.len() as u32);
                                explicit.push(segs);
                                e
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ParetoFront3D { src, c0, n, levels, explicit, stats: SolveStats::default() }
    }

    pub fn src(&self) -> NodeId {
        self.src
    }

    pub fn c0(&self) -> usize {
        self.c0
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn front(&self, i: usize, d: NodeId) -> &[FrontEntry] {
        &self.levels[i][d as usize]
    }

    /// Total number of entries over all levels and destinations.
    pub fn entry_count(&self) -> usize {
        self.levels.iter().flatten().map(Vec::len).sum()
    }

    /// Canonical serialization of the fronts, used for byte-level
    /// comparisons.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&(&self.src, &self.c0, &self.levels, &self.explicit))
            .expect("front serialization cannot fail")
    }
}

/// One entry of the previous iteration that may be extended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtItem {
    pub delay_units: u64,
    pub delay_us: u64,
    pub cost: u64,
    pub segments: u32,
    /// Position in the previous-level front of its node.
    pub pos: u32,
}

/// Nodes with entries that were new at the previous iteration.
pub type ExtendList = Vec<(NodeId, Vec<ExtItem>)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellEntry {
    delay_us: u64,
    cost: u64,
    iteration: u32,
    segments: u32,
    origin: Origin,
}

/// Per-destination state: Γ+1 delay cells of up to `k` entries each, plus
/// the cells touched during the current iteration.
#[derive(Debug, Clone)]
pub struct DistArray {
    k: usize,
    entries: Vec<CellEntry>,
    lens: Vec<u8>,
    touched: Vec<bool>,
    touched_list: Vec<u32>,
}

const EMPTY: CellEntry = CellEntry { delay_us: 0, cost: 0, iteration: 0, segments: 0, origin: Origin::Source };

impl DistArray {
    pub fn new(cells: usize, k: usize) -> Self {
        DistArray {
            k,
            entries: vec![EMPTY; cells * k],
            lens: vec![0; cells],
            touched: vec![false; cells],
            touched_list: Vec::new(),
        }
    }

    pub fn cells(&self) -> usize {
        self.lens.len()
    }

    fn cell(&self, d: usize) -> &[CellEntry] {
        &self.entries[d * self.k..d * self.k + self.lens[d] as usize]
    }

    /// (exact delay, cost) pairs of cell `d`.
    pub fn cell_pairs(&self, d: usize) -> Vec<(u64, u64)> {
        self.cell(d).iter().map(|e| (e.delay_us, e.cost)).collect()
    }

    fn begin_iteration(&mut self) {
        for &d in &self.touched_list {
            self.touched[d as usize] = false;
        }
        self.touched_list.clear();
    }

    fn mark(&mut self, d: usize) -> bool {
        if self.touched[d] {
            return false;
        }
        self.touched[d] = true;
        self.touched_list.push(d as u32);
        true
    }

    /// Offers a candidate to cell `d`. Returns whether the cell changed and
    /// whether a non-dominated entry (kept or offered) was lost.
    fn offer(&mut self, d: usize, cand: CellEntry) -> (bool, bool) {
        let len = self.lens[d] as usize;
        let base = d * self.k;
        if self.k == 1 {
            let old = self.entries[base];
            if len == 0 || cand.cost < old.cost {
                self.entries[base] = cand;
                self.lens[d] = 1;
                return (true, len > 0 && old.delay_us < cand.delay_us);
            }
            return (false, cand.delay_us < old.delay_us);
        }
        let cell = &mut self.entries[base..base + self.k];
        if cell[..len].iter().any(|e| e.delay_us <= cand.delay_us && e.cost <= cand.cost) {
            return (false, false);
        }
        let mut kept = 0;
        for j in 0..len {
            let e = cell[j];
            if !(cand.delay_us <= e.delay_us && cand.cost <= e.cost) {
                cell[kept] = e;
                kept += 1;
            }
        }
        let at = cell[..kept].partition_point(|e| e.delay_us < cand.delay_us);
        if kept < self.k {
            cell.copy_within(at..kept, at + 1);
            cell[at] = cand;
            self.lens[d] = (kept + 1) as u8;
            return (true, false);
        }
        // Full: drop the costliest entry, which is the one with the lowest delay.
        if at == 0 {
            return (false, true);
        }
        cell.copy_within(1..at, 0);
        cell[at - 1] = cand;
        self.lens[d] = kept as u8;
        (true, true)
    }
}

/// Counters returned by [`extend_paths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExtendOutcome {
    /// Cells touched for the first time this iteration.
    pub nb: usize,
    /// Highest touched cell index.
    pub imax: usize,
    pub extensions: u64,
    pub overflows: u64,
}

struct Step<'a> {
    sr: &'a SrGraph,
    cfg: &'a SolverConfig,
    iteration: u32,
}

impl Step<'_> {
    #[inline]
    fn relax(
        &self,
        dist: &mut DistArray,
        u: NodeId,
        e_idx: usize,
        edge: &crate::srgraph::SegmentEdge,
        item: &ExtItem,
        out: &mut ExtendOutcome,
    ) {
        let delay_us = item.delay_us + edge.delay_us;
        let cell = if self.cfg.k_per_cell == 1 {
            item.delay_units + edge.delay_units
        } else {
            self.sr.discretization().discretize(delay_us)
        };
        let cost = item.cost.saturating_add(edge.cost);
        if cell > self.cfg.c1_units || cost > self.cfg.c2 {
            return;
        }
        let d = cell as usize;
        let cand = CellEntry {
            delay_us,
            cost,
            iteration: self.iteration,
            segments: item.segments + 1,
            origin: Origin::Step {
                prev_node: u,
                edge: e_idx as u32,
                prev_level: self.iteration - 1,
                prev_pos: item.pos,
            },
        };
        let (changed, evicted) = dist.offer(d, cand);
        out.overflows += evicted as u64;
        if changed {
            if dist.mark(d) {
                out.nb += 1;
            }
            out.imax = out.imax.max(d);
        }
    }
}

/// Relaxes every segment into `v` from every entry of `ext` (Alg. 2).
pub fn extend_paths(
    v: NodeId,
    ext: &ExtendList,
    dist: &mut DistArray,
    sr: &SrGraph,
    cfg: &SolverConfig,
    iteration: u32,
) -> ExtendOutcome {
    let step = Step { sr, cfg, iteration };
    let mut out = ExtendOutcome::default();
    for (u, items) in ext {
        for (e_idx, edge) in sr.edges(*u, v).iter().enumerate() {
            out.extensions += items.len() as u64;
            for item in items {
                step.relax(dist, *u, e_idx, edge, item, &mut out);
            }
        }
    }
    out
}

/// ExtendList laid out densely by node and delay cell, so that stress mode
/// can visit every (segment, cell) pair.
struct DenseExtend<'a> {
    cells: usize,
    items: Vec<&'a [ExtItem]>,
    ranges: Vec<(u32, u32)>,
}

impl<'a> DenseExtend<'a> {
    fn new(n: usize, cells: usize, ext: &'a ExtendList) -> Self {
        let mut items: Vec<&[ExtItem]> = vec![&[]; n];
        let mut ranges = vec![(0u32, 0u32); n * cells];
        for (u, list) in ext {
            items[*u as usize] = list;
            let row = &mut ranges[*u as usize * cells..(*u as usize + 1) * cells];
            for (k, item) in list.iter().enumerate() {
                let r = &mut row[item.delay_units as usize];
                if r.0 == r.1 {
                    *r = (k as u32, k as u32 + 1);
                } else {
                    r.1 = k as u32 + 1;
                }
            }
        }
        DenseExtend { cells, items, ranges }
    }
}

/// Stress-mode variant of [`extend_paths`]: visits every segment into `v`
/// against every delay cell of its tail node, whether populated or not.
fn extend_paths_dense(v: NodeId, dense: &DenseExtend<'_>, dist: &mut DistArray, step: &Step<'_>) -> ExtendOutcome {
    let mut out = ExtendOutcome::default();
    let n = dense.items.len();
    for u in 0..n as NodeId {
        let items = dense.items[u as usize];
        let row = &dense.ranges[u as usize * dense.cells..(u as usize + 1) * dense.cells];
        for (e_idx, edge) in step.sr.edges(u, v).iter().enumerate() {
            out.extensions += dense.cells as u64;
            for &(s, e) in row {
                for item in &items[s as usize..e as usize] {
                    step.relax(dist, u, e_idx, edge, item, &mut out);
                }
            }
        }
    }
    out
}

/// Cell scanning strategy of Alg. 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanStrategy {
    /// Merge the previous front's cells with the freshly touched ones.
    Merge,
    /// Scan every cell up to the delay bound.
    Dense,
}

/// Merge when `nb ln nb + nb + |prev front| < maxd`.
pub fn choose_scan(nb: usize, prev_len: usize, maxd: usize) -> ScanStrategy {
    let nbf = nb as f64;
    let merge_cost = if nb > 0 { nbf * nbf.ln() } else { 0.0 } + nbf + prev_len as f64;
    if merge_cost < maxd as f64 {
        ScanStrategy::Merge
    } else {
        ScanStrategy::Dense
    }
}

/// Increasing cell indices to scan for `v`'s new front.
pub fn scan_indices(strategy: ScanStrategy, dist: &DistArray, prev_front: &[FrontEntry], maxd: usize) -> Vec<usize> {
    match strategy {
        ScanStrategy::Dense => (0..=maxd.min(dist.cells() - 1)).collect(),
        ScanStrategy::Merge => {
            let mut fresh: Vec<usize> = dist.touched_list.iter().map(|&d| d as usize).collect();
            fresh.sort_unstable();
            let mut out = Vec::with_capacity(fresh.len() + prev_front.len());
            let mut old = prev_front.iter().map(|e| e.delay_units as usize).peekable();
            let mut fresh = fresh.into_iter().peekable();
            loop {
                let next = match (old.peek(), fresh.peek()) {
                    (None, None) => break,
                    (Some(&a), None) => {
                        old.next();
                        a
                    }
                    (None, Some(&b)) => {
                        fresh.next();
                        b
                    }
                    (Some(&a), Some(&b)) => {
                        if a <= b {
                            old.next();
                            a
                        } else {
                            fresh.next();
                            b
                        }
                    }
                };
                if out.last() != Some(&next) {
                    out.push(next);
                }
            }
            out
        }
    }
}

/// Reads the new front of `v` off its cells (Alg. 3): an entry is kept when
/// its cost beats every cheaper-delay entry; kept entries written during
/// `iteration` also go to the next ExtendList.
pub fn cpt_extendable_paths(
    dist: &DistArray,
    indices: impl IntoIterator<Item = usize>,
    iteration: u32,
) -> (Vec<FrontEntry>, Vec<ExtItem>) {
    let mut front = Vec::new();
    let mut ext = Vec::new();
    let mut last = u64::MAX;
    for d in indices {
        for e in dist.cell(d) {
            if e.cost < last {
                last = e.cost;
                if e.iteration == iteration {
                    ext.push(ExtItem {
                        delay_units: d as u64,
                        delay_us: e.delay_us,
                        cost: e.cost,
                        segments: e.segments,
                        pos: front.len() as u32,
                    });
                }
                front.push(FrontEntry {
                    delay_units: d as u64,
                    delay_us: e.delay_us,
                    cost: e.cost,
                    segments: e.segments,
                    origin: e.origin,
                });
            }
        }
    }
    (front, ext)
}

struct NodeResult {
    front: Vec<FrontEntry>,
    ext: Vec<ExtItem>,
    outcome: ExtendOutcome,
    strategy: ScanStrategy,
}

/// Computes all Pareto fronts from `src` with at most `cfg.c0` segments.
pub fn best2cop(sr: &SrGraph, src: NodeId, cfg: &SolverConfig) -> Result<ParetoFront3D, SolverError> {
    cfg.validate(sr)?;
    if src as usize >= sr.node_count() {
        return Err(SolverError::UnknownSource(src));
    }
    if cfg.threads == 1 {
        return Ok(run(sr, src, cfg, false));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| SolverError::Pool(e.to_string()))?;
    Ok(pool.install(|| run(sr, src, cfg, true)))
}

fn run(sr: &SrGraph, src: NodeId, cfg: &SolverConfig, parallel: bool) -> ParetoFront3D {
    let n = sr.node_count();
    let cells = cfg.c1_units as usize + 1;
    let mut dists: Vec<DistArray> = (0..n).map(|_| DistArray::new(cells, cfg.k_per_cell)).collect();
    let origin_entry = FrontEntry { delay_units: 0, delay_us: 0, cost: 0, segments: 0, origin: Origin::Source };
    dists[src as usize].offer(
        0,
        CellEntry { delay_us: 0, cost: 0, iteration: 0, segments: 0, origin: Origin::Source },
    );
    let mut level0 = vec![Vec::new(); n];
    level0[src as usize].push(origin_entry);
    let mut levels = vec![level0];
    let mut ext: ExtendList =
        vec![(src, vec![ExtItem { delay_units: 0, delay_us: 0, cost: 0, segments: 0, pos: 0 }])];
    let mut stats = SolveStats { peak_extend_entries: 1, ..SolveStats::default() };
    let mut maxd_global = 0usize;

    for i in 1..=cfg.c0 {
        if ext.is_empty() && !cfg.stress_full_iteration {
            break;
        }
        let step = Step { sr, cfg, iteration: i as u32 };
        let prev = &levels[i - 1];
        let dense = cfg.stress_full_iteration.then(|| DenseExtend::new(n, cells, &ext));
        let work = |(v, dist): (usize, &mut DistArray)| {
            dist.begin_iteration();
            let outcome = match &dense {
                Some(dense) => extend_paths_dense(v as NodeId, dense, dist, &step),
                None => extend_paths(v as NodeId, &ext, dist, sr, cfg, i as u32),
            };
            let maxd = maxd_global.max(outcome.imax);
            let strategy = choose_scan(outcome.nb, prev[v].len(), maxd);
            let indices = scan_indices(strategy, dist, &prev[v], maxd);
            let (front, ext) = cpt_extendable_paths(dist, indices, i as u32);
            NodeResult { front, ext, outcome, strategy }
        };
        let results: Vec<NodeResult> = if parallel {
            dists.par_iter_mut().enumerate().map(work).collect()
        } else {
            dists.iter_mut().enumerate().map(work).collect()
        };

        let mut fronts = Vec::with_capacity(n);
        let mut next_ext = Vec::new();
        let mut extensions = 0;
        for (v, r) in results.into_iter().enumerate() {
            maxd_global = maxd_global.max(r.outcome.imax);
            extensions += r.outcome.extensions;
            stats.cell_overflows += r.outcome.overflows;
            match r.strategy {
                ScanStrategy::Merge => stats.merge_scans += 1,
                ScanStrategy::Dense => stats.dense_scans += 1,
            }
            if !r.ext.is_empty() {
                next_ext.push((v as NodeId, r.ext));
            }
            fronts.push(r.front);
        }
        stats.extensions.push(extensions);
        stats.iterations = i;
        stats.peak_extend_entries = stats
            .peak_extend_entries
            .max(next_ext.iter().map(|(_, l)| l.len()).sum());
        levels.push(fronts);
        ext = next_ext;
    }
    while levels.len() <= cfg.c0 {
        let last = levels.last().unwrap().clone();
        levels.push(last);
    }
    ParetoFront3D { src, c0: cfg.c0, n, levels, explicit: Vec::new(), stats }
}

/// Optimization objective of a 2COP query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    /// Fewest segments.
    M0,
    /// Lowest delay.
    M1,
    /// Lowest cost.
    M2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAnswer {
    /// Segment budget of the front the answer was taken from.
    pub level: usize,
    pub entry: FrontEntry,
}

/// Answers `f(objective, c0′, c1′, c2′, src, d)` from a solved front.
/// `c0p` is clamped to the solved budget.
pub fn query_2cop(
    front: &ParetoFront3D,
    objective: Objective,
    c0p: usize,
    c1p: u64,
    c2p: u64,
    d: NodeId,
) -> Option<QueryAnswer> {
    pick(objective, c0p.min(front.c0), c1p, c2p, |i| front.front(i, d).to_vec())
}

fn pick(
    objective: Objective,
    c0p: usize,
    c1p: u64,
    c2p: u64,
    level: impl Fn(usize) -> Vec<FrontEntry>,
) -> Option<QueryAnswer> {
    let ok = |e: &FrontEntry| e.delay_units <= c1p && e.cost <= c2p;
    let found = |entry: Option<&FrontEntry>, i| entry.filter(|e| ok(e)).map(|&entry| QueryAnswer { level: i, entry });
    match objective {
        Objective::M1 => {
            let list = level(c0p);
            found(list.iter().find(|e| e.cost <= c2p), c0p)
        }
        Objective::M2 => {
            let list = level(c0p);
            found(list.iter().rev().find(|e| e.delay_units <= c1p), c0p)
        }
        Objective::M0 => (0..=c0p).find_map(|i| {
            let list = level(i);
            found(list.iter().find(|e| ok(e)), i)
        }),
    }
}

fn last_kind(front: &ParetoFront3D, sr: Option<&SrGraph>, d: NodeId, e: &FrontEntry) -> Option<SegKind> {
    match e.origin {
        Origin::Source => None,
        Origin::Step { prev_node, edge, .. } => {
            let sr = sr.expect("an SR graph is required to inspect solver entries");
            Some(sr.edges(prev_node, d)[edge as usize].kind)
        }
        Origin::Explicit(k) => front.explicit[k as usize].segments.last().map(|s| s.kind),
    }
}

/// Like [`query_2cop`], but a trailing node segment is not counted against
/// the segment budget: budget `i` may use entries with `i + 1` segments
/// whose last segment is a node segment.
pub fn query_2cop_free_last(
    front: &ParetoFront3D,
    sr: Option<&SrGraph>,
    objective: Objective,
    c0p: usize,
    c1p: u64,
    c2p: u64,
    d: NodeId,
) -> Option<QueryAnswer> {
    let c0p = c0p.min(front.c0);
    let effective = |e: &FrontEntry| {
        let free = last_kind(front, sr, d, e) == Some(SegKind::Node);
        e.segments - free as u32
    };
    pick(objective, c0p, c1p, c2p, |i| {
        let mut all: Vec<FrontEntry> = front.front(i, d).to_vec();
        if i < front.c0 {
            all.extend(front.front(i + 1, d).iter().filter(|e| effective(e) as usize <= i));
        }
        all.sort_by_key(|e| (e.delay_units, e.cost, e.segments));
        let mut list: Vec<FrontEntry> = Vec::new();
        for e in all {
            if list.last().is_none_or(|l| e.cost < l.cost) {
                list.push(e);
            }
        }
        list
    })
}

/// Walks predecessor records back to the source and returns the segments
/// realizing `entry`, a member of some front of `d`.
///
/// # Panics
/// Panics on a broken predecessor chain, or when `sr` is `None` for an entry
/// produced by [`best2cop`].
pub fn reconstruct_segments(front: &ParetoFront3D, sr: Option<&SrGraph>, d: NodeId, entry: &FrontEntry) -> SegmentList {
    let mut rev = Vec::new();
    let mut node = d;
    let mut cur = *entry;
    loop {
        match cur.origin {
            Origin::Source => {
                assert_eq!(node, front.src, "predecessor chain does not end at the source");
                break;
            }
            Origin::Explicit(k) => {
                assert!(rev.is_empty(), "explicit entries cannot be predecessors");
                return front.explicit[k as usize].clone();
            }
            Origin::Step { prev_node, edge, prev_level, prev_pos } => {
                let sr = sr.expect("an SR graph is required to reconstruct solver entries");
                let e = sr.edges(prev_node, node)[edge as usize];
                rev.push((prev_node, node, e));
                cur = *front
                    .levels
                    .get(prev_level as usize)
                    .and_then(|l| l[prev_node as usize].get(prev_pos as usize))
                    .expect("broken predecessor chain");
                node = prev_node;
            }
        }
    }
    let mut out = SegmentList::default();
    for (from, to, e) in rev.into_iter().rev() {
        let seg = Segment { kind: e.kind, from, to, link_index: e.link_index };
        out.push(seg, e.delay_units, e.delay_us, e.cost);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srgraph::{build_sr_graph, SegmentEdge};
    use crate::topology::{DiscretizationConfig, Graph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disc() -> DiscretizationConfig {
        DiscretizationConfig::new(100, 10).unwrap()
    }

    fn pairs(f: &[FrontEntry]) -> Vec<(u64, u64)> {
        f.iter().map(|e| (e.delay_units, e.cost)).collect()
    }

    fn cell_entry(cost: u64, delay_us: u64, iteration: u32) -> CellEntry {
        CellEntry { delay_us, cost, iteration, segments: 1, origin: Origin::Source }
    }

    #[test]
    fn star_one_segment() {
        let mut g = Graph::new(["c", "s1", "s2", "s3"]);
        for (s, d, c) in [(1, 300, 2), (2, 500, 1), (3, 700, 4)] {
            g.add_undirected(0, s, d, c);
        }
        let sr = build_sr_graph(&g, &disc()).unwrap();
        let f = best2cop(&sr, 0, &SolverConfig::new(1, 1000)).unwrap();
        assert_eq!(pairs(f.front(1, 1)), [(3, 2)]);
        assert_eq!(pairs(f.front(1, 2)), [(5, 1)]);
        assert_eq!(pairs(f.front(1, 3)), [(7, 4)]);
        assert_eq!(pairs(f.front(0, 0)), [(0, 0)]);
        assert!(f.front(0, 1).is_empty());
    }

    fn one_edge_sr(delay_units: u64, cost: u64) -> SrGraph {
        let e = SegmentEdge { kind: SegKind::Node, delay_units, delay_us: delay_units * 100, cost, link_index: None };
        SrGraph::from_pairs(2, disc(), vec![vec![], vec![e], vec![e], vec![]])
    }

    #[test]
    fn extension_respects_delay_limit() {
        let sr = one_edge_sr(50, 1);
        let cfg = SolverConfig::new(2, 40);
        let mut dist = DistArray::new(41, 1);
        let ext = vec![(0, vec![ExtItem { delay_units: 0, delay_us: 0, cost: 0, segments: 0, pos: 0 }])];
        let out = extend_paths(1, &ext, &mut dist, &sr, &cfg, 1);
        assert_eq!(out.nb, 0);
        assert!((0..41).all(|d| dist.cell_pairs(d).is_empty()));
    }

    #[test]
    fn cell_keeps_cheaper_and_counts_once() {
        let sr = one_edge_sr(3, 0);
        let cfg = SolverConfig::new(2, 100);
        let mut dist = DistArray::new(101, 1);
        let item = |cost| ExtItem { delay_units: 1, delay_us: 100, cost, segments: 0, pos: 0 };
        let ext = vec![(0, vec![item(9), item(7)])];
        let out = extend_paths(1, &ext, &mut dist, &sr, &cfg, 1);
        assert_eq!((out.nb, out.imax), (1, 4));
        assert_eq!(dist.cell_pairs(4), [(400, 7)]);
    }

    #[test]
    fn exact_sub_front_in_cell() {
        let mut dist = DistArray::new(10, 2);
        assert_eq!(dist.offer(4, cell_entry(9, 410, 1)), (true, false));
        assert_eq!(dist.offer(4, cell_entry(7, 450, 1)), (true, false));
        assert_eq!(dist.cell_pairs(4), [(410, 9), (450, 7)]);
        // Dominated exactly: rejected.
        assert_eq!(dist.offer(4, cell_entry(8, 460, 1)), (false, false));
        // Dominates (450, 7): replaces it.
        assert_eq!(dist.offer(4, cell_entry(6, 440, 1)), (true, false));
        assert_eq!(dist.cell_pairs(4), [(410, 9), (440, 6)]);
        // Third non-dominated entry: the costliest one is evicted.
        assert_eq!(dist.offer(4, cell_entry(8, 420, 1)), (true, true));
        assert_eq!(dist.cell_pairs(4), [(420, 8), (440, 6)]);
        // A candidate that would itself be the costliest is refused, and lost.
        assert_eq!(dist.offer(4, cell_entry(10, 405, 1)), (false, true));
    }

    fn dist_from(cells: &[(usize, u64, u32)], size: usize) -> DistArray {
        let mut dist = DistArray::new(size, 1);
        for &(d, cost, it) in cells {
            dist.offer(d, cell_entry(cost, d as u64 * 100, it));
            if it == 2 {
                dist.mark(d);
            }
        }
        dist
    }

    #[test]
    fn running_minimum_scan() {
        let dist = dist_from(&[(2, 5, 1), (3, 7, 1), (4, 4, 1)], 6);
        let (front, ext) = cpt_extendable_paths(&dist, 0..6, 2);
        assert_eq!(pairs(&front), [(2, 5), (4, 4)]);
        assert!(ext.is_empty());
    }

    #[test]
    fn untouched_cells_keep_previous_front() {
        let dist = dist_from(&[(2, 5, 1), (4, 4, 1)], 6);
        let (prev, _) = cpt_extendable_paths(&dist, 0..6, 1);
        let idx = scan_indices(ScanStrategy::Merge, &dist, &prev, 5);
        let (front, ext) = cpt_extendable_paths(&dist, idx, 2);
        assert_eq!(front, prev);
        assert!(ext.is_empty());
    }

    #[test]
    fn merge_and_dense_scans_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let size = rng.random_range(1..40);
            let mut old = Vec::new();
            for d in 0..size {
                if rng.random_bool(0.3) {
                    old.push((d, rng.random_range(0..50), 1));
                }
            }
            let dist = dist_from(&old, size);
            let (prev, _) = cpt_extendable_paths(&dist, 0..size, 1);
            let mut dist = dist;
            for d in 0..size {
                if rng.random_bool(0.2) {
                    let cost = rng.random_range(0..50);
                    if dist.offer(d, cell_entry(cost, d as u64 * 100, 2)).0 {
                        dist.mark(d);
                    }
                }
            }
            let maxd = size - 1;
            let merged = cpt_extendable_paths(&dist, scan_indices(ScanStrategy::Merge, &dist, &prev, maxd), 2);
            let dense = cpt_extendable_paths(&dist, scan_indices(ScanStrategy::Dense, &dist, &prev, maxd), 2);
            assert_eq!(merged, dense);
        }
    }

    #[test]
    fn scan_choice_follows_cost_model() {
        assert_eq!(choose_scan(0, 3, 10), ScanStrategy::Merge);
        assert_eq!(choose_scan(10, 5, 20), ScanStrategy::Dense);
        assert_eq!(choose_scan(1, 2, 4), ScanStrategy::Merge);
    }

    #[test]
    fn query_on_empty_front() {
        let sr = one_edge_sr(5, 1);
        let f = best2cop(&sr, 0, &SolverConfig::new(2, 4)).unwrap();
        for obj in [Objective::M0, Objective::M1, Objective::M2] {
            assert_eq!(query_2cop(&f, obj, 2, 4, u64::MAX, 1), None);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let sr = one_edge_sr(5, 1);
        assert!(best2cop(&sr, 0, &SolverConfig::new(0, 4)).is_err());
        assert!(best2cop(&sr, 0, &SolverConfig::new(2, 1001)).is_err());
        assert!(best2cop(&sr, 5, &SolverConfig::new(2, 10)).is_err());
    }

    #[test]
    fn single_segment_reconstruction() {
        let sr = one_edge_sr(5, 1);
        let f = best2cop(&sr, 0, &SolverConfig::new(2, 100)).unwrap();
        let e = f.front(1, 1)[0];
        let s = reconstruct_segments(&f, Some(&sr), 1, &e);
        assert_eq!(s.segments, vec![Segment::node(0, 1)]);
        assert_eq!((s.delay_units, s.cost), (5, 1));
    }
}
