//! Raw network graphs, multi-area partitions, JSON file formats and delay
//! discretization.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod random;

/// Dense node identifier, `0..node_count()`.
pub type NodeId = u32;

/// Identifier of an area. Area 0 is the backbone.
pub type AreaId = u32;

pub const BACKBONE: AreaId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
    pub delay_us: u64,
    pub cost: u64,
    /// Ordinal of this link among the parallel links from `src` to `dst`.
    pub link_index: u32,
}

/// Directed multigraph with per-link delay and IGP cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    links: Vec<Link>,
    out: Vec<Vec<u32>>,
}

impl Graph {
    /// Creates a graph without links. Node ids follow the order of `names`.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let out = vec![Vec::new(); names.len()];
        Graph { names, links: Vec::new(), out }
    }

    /// Creates a graph whose nodes are named `n0`, `n1`, ... zero-padded so
    /// that lexicographic order matches id order.
    pub fn with_node_count(n: usize) -> Self {
        let width = n.saturating_sub(1).to_string().len();
        Graph::new((0..n).map(|i| format!("n{i:0width$}")))
    }

    /// Appends a directed link and returns its position in [`Graph::links`].
    ///
    /// # Panics
    /// Panics if either endpoint is not a node of the graph.
    pub fn add_link(&mut self, src: NodeId, dst: NodeId, delay_us: u64, cost: u64) -> usize {
        let n = self.names.len() as u32;
        assert!(src < n && dst < n, "link endpoint out of range");
        let link_index = self.out[src as usize]
            .iter()
            .filter(|&&l| self.links[l as usize].dst == dst)
            .count() as u32;
        let pos = self.links.len();
        self.links.push(Link { src, dst, delay_us, cost, link_index });
        self.out[src as usize].push(pos as u32);
        pos
    }

    /// Adds a link in both directions with identical weights.
    pub fn add_undirected(&mut self, a: NodeId, b: NodeId, delay_us: u64, cost: u64) {
        self.add_link(a, b, delay_us, cost);
        self.add_link(b, a, delay_us, cost);
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, pos: usize) -> &Link {
        &self.links[pos]
    }

    /// Outgoing links of `u`, in insertion order.
    pub fn out_links(&self, u: NodeId) -> impl Iterator<Item = &Link> + '_ {
        self.out[u as usize].iter().map(move |&l| &self.links[l as usize])
    }

    /// Returns the `link_index`-th parallel link from `src` to `dst`.
    pub fn find_link(&self, src: NodeId, dst: NodeId, link_index: u32) -> Option<&Link> {
        self.out_links(src)
            .find(|l| l.dst == dst && l.link_index == link_index)
    }

    pub fn name(&self, u: NodeId) -> &str {
        &self.names[u as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(|p| p as NodeId)
    }

    /// Nodes reachable from `root` along directed links.
    pub fn reachable_from(&self, root: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([root]);
        seen[root as usize] = true;
        while let Some(u) = queue.pop_front() {
            for l in self.out_links(u) {
                if !seen[l.dst as usize] {
                    seen[l.dst as usize] = true;
                    queue.push_back(l.dst);
                }
            }
        }
        seen
    }

    /// True when every node reaches every other node.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        if self.reachable_from(0).iter().any(|r| !r) {
            return false;
        }
        let mut rev = Graph::new(self.names.iter().cloned());
        for l in &self.links {
            rev.add_link(l.dst, l.src, l.delay_us, l.cost);
        }
        rev.reachable_from(0).iter().all(|&r| r)
    }

    /// Subgraph induced by `nodes` (kept in the given order), together with
    /// the local-to-global id map.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<NodeId>) {
        let mut local = HashMap::with_capacity(nodes.len());
        for (i, &u) in nodes.iter().enumerate() {
            local.insert(u, i as NodeId);
        }
        let mut sub = Graph::new(nodes.iter().map(|&u| self.name(u).to_string()));
        for l in &self.links {
            if let (Some(&s), Some(&d)) = (local.get(&l.src), local.get(&l.dst)) {
                sub.add_link(s, d, l.delay_us, l.cost);
            }
        }
        (sub, nodes.to_vec())
    }
}

/// Delay discretization parameters: constraint `c1_ms` and accuracy `gamma`
/// (units per millisecond).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretizationConfig {
    pub c1_ms: u64,
    pub gamma: u64,
    /// Declared measurement trueness in microseconds, if known.
    pub trueness_us: Option<u64>,
}

impl DiscretizationConfig {
    pub fn new(c1_ms: u64, gamma: u64) -> Result<Self, TopologyError> {
        if c1_ms == 0 || gamma == 0 {
            return Err(TopologyError::Config(format!(
                "c1_ms and gamma must be positive (got c1_ms={c1_ms}, gamma={gamma})"
            )));
        }
        c1_ms
            .checked_mul(gamma)
            .ok_or_else(|| TopologyError::Config("c1_ms * gamma overflows".into()))?;
        Ok(DiscretizationConfig { c1_ms, gamma, trueness_us: None })
    }

    pub fn with_trueness(mut self, trueness_us: u64) -> Self {
        self.trueness_us = Some(trueness_us);
        self
    }

    /// Array capacity Γ = c1_ms × gamma.
    pub fn gamma_capacity(&self) -> u64 {
        self.c1_ms * self.gamma
    }

    /// Width of one delay unit in microseconds.
    pub fn grain_us(&self) -> f64 {
        1000.0 / self.gamma as f64
    }

    /// Whether the declared trueness is no finer than one delay unit, in
    /// which case truncation loses no measurable information.
    pub fn is_lossless(&self) -> Option<bool> {
        self.trueness_us.map(|t| t as f64 >= self.grain_us())
    }

    pub fn discretize(&self, delay_us: u64) -> u64 {
        discretize_delay(delay_us, self)
    }
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig { c1_ms: 100, gamma: 10, trueness_us: None }
    }
}

/// Truncates a microsecond delay to delay units: `floor(delay_us * gamma / 1000)`.
///
/// # Panics
/// Panics if the intermediate product overflows `u64`.
pub fn discretize_delay(delay_us: u64, cfg: &DiscretizationConfig) -> u64 {
    delay_us
        .checked_mul(cfg.gamma)
        .expect("delay discretization overflow")
        / 1000
}

/// A graph partitioned into a backbone (area 0) and stub areas, each stub
/// area attached to the backbone through two border routers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiAreaGraph {
    pub graph: Graph,
    /// Area id to sorted member nodes.
    pub areas: BTreeMap<AreaId, Vec<NodeId>>,
    /// Stub area id to its two border routers.
    pub abrs: BTreeMap<AreaId, [NodeId; 2]>,
}

impl MultiAreaGraph {
    /// The non-backbone area containing `u`, if any.
    pub fn home_area(&self, u: NodeId) -> Option<AreaId> {
        self.areas
            .iter()
            .find(|(&a, nodes)| a != BACKBONE && nodes.binary_search(&u).is_ok())
            .map(|(&a, _)| a)
    }

    pub fn in_area(&self, area: AreaId, u: NodeId) -> bool {
        self.areas
            .get(&area)
            .is_some_and(|nodes| nodes.binary_search(&u).is_ok())
    }

    pub fn is_backbone(&self, u: NodeId) -> bool {
        self.in_area(BACKBONE, u)
    }

    pub fn stub_areas(&self) -> impl Iterator<Item = AreaId> + '_ {
        self.areas.keys().copied().filter(|&a| a != BACKBONE)
    }
}

/// One violated invariant found by validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum Issue {
    DuplicateNode { name: String },
    DanglingEndpoint { link: usize, endpoint: String },
    NonPositiveCost { link: usize, cost: i64 },
    NegativeDelay { link: usize, delay_us: i64 },
    Disconnected { unreachable: Vec<String> },
    NodeWithoutArea { node: String },
    NodeInSeveralAreas { node: String, areas: Vec<AreaId> },
    UnknownArea { area: String },
    AbrCount { area: AreaId, count: usize },
    MissingAbrs { area: AreaId },
    AbrOutsideArea { area: AreaId, node: String },
    InterAreaLink { link: usize, src: String, dst: String },
    SeparatorViolated { area: AreaId, leak: String },
}

impl Issue {
    /// Connectivity problems are reported but do not make a file unusable.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Issue::Disconnected { .. })
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DuplicateNode { name } => write!(f, "duplicate node name {name:?}"),
            Issue::DanglingEndpoint { link, endpoint } => {
                write!(f, "dangling endpoint {endpoint:?} on link #{link}")
            }
            Issue::NonPositiveCost { link, cost } => {
                write!(f, "non-positive cost {cost} on link #{link}")
            }
            Issue::NegativeDelay { link, delay_us } => {
                write!(f, "negative delay {delay_us} us on link #{link}")
            }
            Issue::Disconnected { unreachable } => {
                write!(f, "disconnected: {} node(s) not mutually reachable", unreachable.len())?;
                if let Some(first) = unreachable.first() {
                    write!(f, " (e.g. {first:?})")?;
                }
                Ok(())
            }
            Issue::NodeWithoutArea { node } => write!(f, "node {node:?} belongs to no area"),
            Issue::NodeInSeveralAreas { node, areas } => {
                write!(f, "node {node:?} belongs to several stub areas {areas:?}")
            }
            Issue::UnknownArea { area } => write!(f, "unknown area {area:?}"),
            Issue::AbrCount { area, count } => {
                write!(f, "area {area} lists {count} ABRs, exactly 2 are supported")
            }
            Issue::MissingAbrs { area } => write!(f, "area {area} has no ABR entry"),
            Issue::AbrOutsideArea { area, node } => write!(
                f,
                "ABR {node:?} of area {area} must belong to that area and to the backbone"
            ),
            Issue::InterAreaLink { link, src, dst } => {
                write!(f, "link #{link} {src:?}->{dst:?} joins nodes sharing no area")
            }
            Issue::SeparatorViolated { area, leak } => write!(
                f,
                "separator violated: interior of area {area} reaches {leak:?} without crossing its ABRs"
            ),
        }
    }
}

/// Result of [`validate_graph`] or [`validate_multiarea`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has_fatal(&self) -> bool {
        self.issues.iter().any(Issue::is_fatal)
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.issues.iter().any(|i| i.to_string().contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid topology: {0}")]
    Invalid(ValidationReport),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Checks link endpoints, costs and strong connectivity.
pub fn validate_graph(g: &Graph) -> ValidationReport {
    let mut issues = Vec::new();
    let n = g.node_count() as NodeId;
    let mut seen = BTreeSet::new();
    for name in g.names() {
        if !seen.insert(name.as_str()) {
            issues.push(Issue::DuplicateNode { name: name.clone() });
        }
    }
    let mut dangling = false;
    for (k, l) in g.links().iter().enumerate() {
        for end in [l.src, l.dst] {
            if end >= n {
                dangling = true;
                issues.push(Issue::DanglingEndpoint { link: k, endpoint: end.to_string() });
            }
        }
        if l.cost == 0 {
            issues.push(Issue::NonPositiveCost { link: k, cost: 0 });
        }
    }
    if !dangling && !g.is_strongly_connected() {
        let reach = g.reachable_from(0);
        let mut unreachable: Vec<String> = (0..n)
            .filter(|&u| !reach[u as usize])
            .map(|u| g.name(u).to_string())
            .collect();
        if unreachable.is_empty() {
            unreachable = (0..n)
                .filter(|&u| !g.reachable_from(u)[0])
                .map(|u| g.name(u).to_string())
                .collect();
        }
        issues.push(Issue::Disconnected { unreachable });
    }
    ValidationReport { issues }
}

/// Checks [`validate_graph`] plus area membership, ABR placement, intra-area
/// links and the separator property of every stub area.
pub fn validate_multiarea(mg: &MultiAreaGraph) -> ValidationReport {
    let mut report = validate_graph(&mg.graph);
    let g = &mg.graph;
    let n = g.node_count();
    let mut stub_of: Vec<Vec<AreaId>> = vec![Vec::new(); n];
    let mut in_any = vec![false; n];
    for (&a, nodes) in &mg.areas {
        for &u in nodes {
            in_any[u as usize] = true;
            if a != BACKBONE {
                stub_of[u as usize].push(a);
            }
        }
    }
    for u in 0..n {
        if !in_any[u] {
            report.issues.push(Issue::NodeWithoutArea { node: g.name(u as NodeId).into() });
        }
        if stub_of[u].len() > 1 {
            report.issues.push(Issue::NodeInSeveralAreas {
                node: g.name(u as NodeId).into(),
                areas: stub_of[u].clone(),
            });
        }
    }
    for a in mg.stub_areas() {
        match mg.abrs.get(&a) {
            None => report.issues.push(Issue::MissingAbrs { area: a }),
            Some(pair) => {
                for &r in pair {
                    if !mg.in_area(a, r) || !mg.is_backbone(r) {
                        report.issues.push(Issue::AbrOutsideArea { area: a, node: g.name(r).into() });
                    }
                }
            }
        }
    }
    for &a in mg.abrs.keys() {
        if a == BACKBONE || !mg.areas.contains_key(&a) {
            report.issues.push(Issue::UnknownArea { area: a.to_string() });
        }
    }
    for (k, l) in g.links().iter().enumerate() {
        let shared = mg
            .areas
            .values()
            .any(|nodes| nodes.binary_search(&l.src).is_ok() && nodes.binary_search(&l.dst).is_ok());
        if !shared {
            report.issues.push(Issue::InterAreaLink {
                link: k,
                src: g.name(l.src).into(),
                dst: g.name(l.dst).into(),
            });
        }
    }
    for a in mg.stub_areas() {
        let Some(abrs) = mg.abrs.get(&a) else { continue };
        if let Some(leak) = separator_leak(mg, a, abrs) {
            report.issues.push(Issue::SeparatorViolated { area: a, leak: g.name(leak).into() });
        }
    }
    report
}

/// Searches from the interior of `area` without entering its ABRs and
/// returns the first node found outside the area.
fn separator_leak(mg: &MultiAreaGraph, area: AreaId, abrs: &[NodeId; 2]) -> Option<NodeId> {
    let g = &mg.graph;
    let nodes = &mg.areas[&area];
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::new();
    for &u in nodes {
        if !abrs.contains(&u) {
            seen[u as usize] = true;
            queue.push_back(u);
        }
    }
    while let Some(u) = queue.pop_front() {
        for l in g.out_links(u) {
            let v = l.dst;
            if abrs.contains(&v) || seen[v as usize] {
                continue;
            }
            if nodes.binary_search(&v).is_err() {
                return Some(v);
            }
            seen[v as usize] = true;
            queue.push_back(v);
        }
    }
    None
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkRecord {
    src: String,
    dst: String,
    delay_us: i64,
    cost: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<String>,
    directed: bool,
    links: Vec<LinkRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    areas: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    abrs: Option<BTreeMap<String, Vec<String>>>,
}

/// Either kind of topology file content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    Flat(Graph),
    MultiArea(MultiAreaGraph),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyFormat {
    Flat,
    MultiArea,
}

/// Reads and validates a topology file.
pub fn parse_topology(path: impl AsRef<Path>, format: TopologyFormat) -> Result<Topology, TopologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| TopologyError::Io { path: path.display().to_string(), source })?;
    match format {
        TopologyFormat::Flat => parse_flat_str(&text).map(Topology::Flat),
        TopologyFormat::MultiArea => parse_multiarea_str(&text).map(Topology::MultiArea),
    }
}

fn read_file(text: &str) -> Result<TopologyFile, TopologyError> {
    serde_json::from_str(text).map_err(|e| TopologyError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn build_graph(file: &TopologyFile) -> Result<(Graph, HashMap<String, NodeId>), TopologyError> {
    let mut names = file.nodes.clone();
    names.sort();
    let mut issues = Vec::new();
    for w in names.windows(2) {
        if w[0] == w[1] {
            issues.push(Issue::DuplicateNode { name: w[0].clone() });
        }
    }
    names.dedup();
    let ids: HashMap<String, NodeId> =
        names.iter().enumerate().map(|(i, n)| (n.clone(), i as NodeId)).collect();
    let mut g = Graph::new(names);
    for (k, rec) in file.links.iter().enumerate() {
        let src = ids.get(&rec.src);
        let dst = ids.get(&rec.dst);
        for (end, name) in [(src, &rec.src), (dst, &rec.dst)] {
            if end.is_none() {
                issues.push(Issue::DanglingEndpoint { link: k, endpoint: name.clone() });
            }
        }
        if rec.cost <= 0 {
            issues.push(Issue::NonPositiveCost { link: k, cost: rec.cost });
        }
        if rec.delay_us < 0 {
            issues.push(Issue::NegativeDelay { link: k, delay_us: rec.delay_us });
        }
        if let (Some(&s), Some(&d)) = (src, dst) {
            if rec.cost > 0 && rec.delay_us >= 0 {
                let (delay, cost) = (rec.delay_us as u64, rec.cost as u64);
                if file.directed {
                    g.add_link(s, d, delay, cost);
                } else {
                    g.add_undirected(s, d, delay, cost);
                }
            }
        }
    }
    if !issues.is_empty() {
        return Err(TopologyError::Invalid(ValidationReport { issues }));
    }
    Ok((g, ids))
}

fn reject_fatal(report: ValidationReport) -> Result<(), TopologyError> {
    if report.has_fatal() {
        Err(TopologyError::Invalid(report))
    } else {
        Ok(())
    }
}

/// Parses a flat topology from JSON text.
pub fn parse_flat_str(text: &str) -> Result<Graph, TopologyError> {
    let file = read_file(text)?;
    let (g, _) = build_graph(&file)?;
    reject_fatal(validate_graph(&g))?;
    Ok(g)
}

/// Parses a multi-area topology from JSON text.
pub fn parse_multiarea_str(text: &str) -> Result<MultiAreaGraph, TopologyError> {
    let file = read_file(text)?;
    let (graph, ids) = build_graph(&file)?;
    let mut issues = Vec::new();
    let mut areas = BTreeMap::new();
    for (key, members) in file.areas.iter().flatten() {
        let Ok(area) = key.parse::<AreaId>() else {
            issues.push(Issue::UnknownArea { area: key.clone() });
            continue;
        };
        let mut nodes = Vec::new();
        for name in members {
            match ids.get(name) {
                Some(&u) => nodes.push(u),
                None => issues.push(Issue::DanglingEndpoint { link: usize::MAX, endpoint: name.clone() }),
            }
        }
        nodes.sort_unstable();
        nodes.dedup();
        areas.insert(area, nodes);
    }
    let mut abrs = BTreeMap::new();
    for (key, members) in file.abrs.iter().flatten() {
        let Ok(area) = key.parse::<AreaId>() else {
            issues.push(Issue::UnknownArea { area: key.clone() });
            continue;
        };
        if members.len() != 2 {
            issues.push(Issue::AbrCount { area, count: members.len() });
            continue;
        }
        let (Some(&a), Some(&b)) = (ids.get(&members[0]), ids.get(&members[1])) else {
            issues.push(Issue::DanglingEndpoint { link: usize::MAX, endpoint: members.join(",") });
            continue;
        };
        abrs.insert(area, [a, b]);
    }
    if !issues.is_empty() {
        return Err(TopologyError::Invalid(ValidationReport { issues }));
    }
    let mg = MultiAreaGraph { graph, areas, abrs };
    reject_fatal(validate_multiarea(&mg))?;
    Ok(mg)
}

fn file_of(g: &Graph) -> TopologyFile {
    TopologyFile {
        nodes: g.names().to_vec(),
        directed: true,
        links: g
            .links()
            .iter()
            .map(|l| LinkRecord {
                src: g.name(l.src).into(),
                dst: g.name(l.dst).into(),
                delay_us: l.delay_us as i64,
                cost: l.cost as i64,
            })
            .collect(),
        areas: None,
        abrs: None,
    }
}

/// Serializes a graph as a directed flat topology file.
pub fn graph_to_json(g: &Graph) -> String {
    serde_json::to_string_pretty(&file_of(g)).expect("topology serialization cannot fail")
}

/// Serializes a multi-area topology file.
pub fn multiarea_to_json(mg: &MultiAreaGraph) -> String {
    let g = &mg.graph;
    let mut file = file_of(g);
    let names = |nodes: &[NodeId]| nodes.iter().map(|&u| g.name(u).to_string()).collect::<Vec<_>>();
    file.areas = Some(mg.areas.iter().map(|(a, nodes)| (a.to_string(), names(nodes))).collect());
    file.abrs = Some(mg.abrs.iter().map(|(a, pair)| (a.to_string(), names(pair))).collect());
    serde_json::to_string_pretty(&file).expect("topology serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(gamma: u64) -> DiscretizationConfig {
        DiscretizationConfig::new(100, gamma).unwrap()
    }

    #[test]
    fn discretization_truncates() {
        assert_eq!(discretize_delay(0, &cfg(10)), 0);
        assert_eq!(discretize_delay(100_000, &cfg(10)), 1000);
        assert_eq!(cfg(10).gamma_capacity(), 1000);
        assert_eq!(discretize_delay(12_345, &cfg(10)), 123);
        assert_eq!(discretize_delay(99, &cfg(10)), 0);
    }

    #[test]
    fn trueness_report() {
        let c = cfg(10);
        assert_eq!(c.is_lossless(), None);
        assert_eq!(c.with_trueness(100).is_lossless(), Some(true));
        assert_eq!(c.with_trueness(10).is_lossless(), Some(false));
    }

    #[test]
    fn zero_config_rejected() {
        assert!(DiscretizationConfig::new(0, 10).is_err());
        assert!(DiscretizationConfig::new(10, 0).is_err());
    }

    #[test]
    fn parses_directed_and_undirected() {
        let text = |directed: bool| {
            format!(
                r#"{{"nodes":["b","a"],"directed":{directed},
                   "links":[{{"src":"a","dst":"b","delay_us":500,"cost":3}}]}}"#
            )
        };
        let g = parse_flat_str(&text(true));
        // A single directed link is not strongly connected but still parses.
        let g = g.unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.names(), ["a", "b"]);
        assert_eq!(g.links(), [Link { src: 0, dst: 1, delay_us: 500, cost: 3, link_index: 0 }]);

        let g = parse_flat_str(&text(false)).unwrap();
        assert_eq!(g.link_count(), 2);
        assert_eq!(g.links()[1], Link { src: 1, dst: 0, delay_us: 500, cost: 3, link_index: 0 });
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_flat_str("{\n  \"nodes\": [\"a\",\n  }").unwrap_err();
        match err {
            TopologyError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_links_are_named() {
        let err = parse_flat_str(
            r#"{"nodes":["a","b"],"directed":false,
                "links":[{"src":"a","dst":"z","delay_us":1,"cost":1},
                         {"src":"a","dst":"b","delay_us":1,"cost":0}]}"#,
        )
        .unwrap_err();
        let TopologyError::Invalid(report) = err else { panic!("expected validation error") };
        assert!(report.mentions("dangling endpoint"));
        assert!(report.mentions("non-positive cost"));
    }

    #[test]
    fn validation_reports() {
        let mut tri = Graph::new(["a", "b", "c"]);
        tri.add_undirected(0, 1, 1, 1);
        tri.add_undirected(1, 2, 1, 1);
        tri.add_undirected(2, 0, 1, 1);
        assert!(validate_graph(&tri).is_valid());

        let mut iso = Graph::new(["a", "b", "c", "d"]);
        for l in tri.links() {
            iso.add_link(l.src, l.dst, l.delay_us, l.cost);
        }
        let r = validate_graph(&iso);
        assert!(r.mentions("disconnected"));
        assert!(!r.has_fatal());

        let mut zero = tri.clone();
        zero.add_link(0, 2, 5, 0);
        assert!(validate_graph(&zero).mentions("non-positive cost"));
    }

    #[test]
    fn parallel_links_get_ordinals() {
        let mut g = Graph::new(["a", "b"]);
        g.add_link(0, 1, 10, 1);
        g.add_link(1, 0, 10, 1);
        g.add_link(0, 1, 5, 2);
        assert_eq!(g.links()[2].link_index, 1);
        assert_eq!(g.find_link(0, 1, 1).unwrap().delay_us, 5);
        assert!(g.find_link(0, 1, 2).is_none());
    }

    fn five_node(backdoor: bool) -> String {
        let mut links = vec![
            r#"{"src":"a1","dst":"x","delay_us":1,"cost":1}"#,
            r#"{"src":"a2","dst":"x","delay_us":1,"cost":1}"#,
            r#"{"src":"a1","dst":"b","delay_us":1,"cost":1}"#,
            r#"{"src":"a2","dst":"c","delay_us":1,"cost":1}"#,
            r#"{"src":"b","dst":"c","delay_us":1,"cost":1}"#,
        ];
        let area1 = if backdoor {
            links.push(r#"{"src":"x","dst":"b","delay_us":1,"cost":1}"#);
            r#"["a1","a2","x","b"]"#
        } else {
            r#"["a1","a2","x"]"#
        };
        format!(
            r#"{{"nodes":["a1","a2","x","b","c"],"directed":false,"links":[{}],
               "areas":{{"0":["a1","a2","b","c"],"1":{area1}}},
               "abrs":{{"1":["a1","a2"]}}}}"#,
            links.join(",")
        )
    }

    #[test]
    fn separator_backdoor_is_rejected() {
        let mg = parse_multiarea_str(&five_node(false)).unwrap();
        assert_eq!(mg.home_area(mg.graph.id_of("x").unwrap()), Some(1));
        assert_eq!(mg.home_area(mg.graph.id_of("b").unwrap()), None);
        let err = parse_multiarea_str(&five_node(true)).unwrap_err();
        assert!(err.to_string().contains("separator violated"), "{err}");
    }

    #[test]
    fn abr_count_other_than_two_rejected() {
        let text = r#"{"nodes":["a","b","c"],"directed":false,
            "links":[{"src":"a","dst":"b","delay_us":1,"cost":1},{"src":"b","dst":"c","delay_us":1,"cost":1}],
            "areas":{"0":["a","b"],"1":["a","b","c"]},"abrs":{"1":["a","b","c"]}}"#;
        let err = parse_multiarea_str(text).unwrap_err();
        assert!(err.to_string().contains("exactly 2"));
    }

    #[test]
    fn round_trip() {
        let mut g = Graph::new(["a", "b", "c"]);
        g.add_undirected(0, 1, 10, 1);
        g.add_undirected(1, 2, 20, 2);
        g.add_link(0, 1, 5, 7);
        g.add_link(2, 0, 0, 1);
        let back = parse_flat_str(&graph_to_json(&g)).unwrap();
        assert_eq!(back, g);
    }
}
