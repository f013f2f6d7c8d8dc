//! Realistic multi-area topology generator.
//!
//! The backbone is grown from a table of cities: nearby cities are merged, a
//! minimum spanning tree over road distances is built (links between the most
//! populated cities are favoured), articulation points are removed, a few
//! attractive shortcuts are added and the result is doubled, giving two core
//! routers per city. Each city then gets its own area with an aggregation and
//! an access layer hanging off the two core routers.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{AreaId, Graph, MultiAreaGraph, NodeId, BACKBONE};

/// Speed of light in km/s.
const LIGHT_KM_S: f64 = 299_792.458;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub name: String,
    pub x_km: f64,
    pub y_km: f64,
    pub population: u64,
}

#[derive(Debug, Error)]
pub enum YarggError {
    #[error("cannot read city table: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot read city table {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid city table: {0}")]
    InvalidTable(String),
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("at least two cities are needed after merging, got {0}")]
    TooFewCities(usize),
}

/// Cities with an optional road-distance matrix. Without one, road
/// distances are Euclidean distances scaled by `road_factor`.
#[derive(Debug, Clone, PartialEq)]
pub struct CityTable {
    pub cities: Vec<City>,
    pub road_km: Option<Vec<Vec<f64>>>,
    pub road_factor: f64,
}

impl CityTable {
    pub fn new(cities: Vec<City>) -> Result<Self, YarggError> {
        let table = CityTable { cities, road_km: None, road_factor: 1.0 };
        table.check()?;
        Ok(table)
    }

    pub fn with_road_distances(mut self, road_km: Vec<Vec<f64>>) -> Result<Self, YarggError> {
        self.road_km = Some(road_km);
        self.check()?;
        Ok(self)
    }

    /// Reads `name,x_km,y_km,population` rows (header required).
    pub fn from_csv_reader(reader: impl Read) -> Result<Self, YarggError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let cities = rdr.deserialize().collect::<Result<Vec<City>, _>>()?;
        CityTable::new(cities)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, YarggError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|source| YarggError::Io { path: path.display().to_string(), source })?;
        CityTable::from_csv_reader(file)
    }

    fn check(&self) -> Result<(), YarggError> {
        let mut names = BTreeSet::new();
        for c in &self.cities {
            if c.population == 0 {
                return Err(YarggError::InvalidTable(format!("city {} has no population", c.name)));
            }
            if !names.insert(c.name.as_str()) {
                return Err(YarggError::InvalidTable(format!("city {} appears twice", c.name)));
            }
        }
        if let Some(m) = &self.road_km {
            let n = self.cities.len();
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(YarggError::InvalidTable("road matrix size differs from city count".into()));
            }
            for (i, row) in m.iter().enumerate() {
                if row[i] != 0.0 {
                    return Err(YarggError::InvalidTable("road matrix diagonal must be zero".into()));
                }
                for (j, &km) in row.iter().enumerate() {
                    if km != m[j][i] || km < 0.0 {
                        return Err(YarggError::InvalidTable("road matrix must be symmetric and non-negative".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.road_km {
            Some(m) => m[i][j],
            None => {
                let (a, b) = (&self.cities[i], &self.cities[j]);
                (a.x_km - b.x_km).hypot(a.y_km - b.y_km) * self.road_factor
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub merge_radius_km: f64,
    /// Most populated cities totalling this share of the population get
    /// prioritized spanning-tree links.
    pub top_population_fraction: f64,
    /// Weight multiplier of prioritized spanning-tree links.
    pub priority_factor: f64,
    /// Shortcut candidates must be closer than this share of the largest
    /// road distance.
    pub near_link_fraction: f64,
    /// Minimum relative shortening a shortcut must bring.
    pub min_reduction: f64,
    /// Shortcut endpoints must have a degree below this.
    pub max_degree: usize,
    pub access_per_group: usize,
    pub groups_per_area: usize,
    pub cost_major: u64,
    pub cost_standard: u64,
    pub cost_optional: u64,
    /// Link between the two routers of a city.
    pub cost_twin: u64,
    pub cost_core_agg: u64,
    pub cost_agg_access: u64,
    pub cost_agg_agg: u64,
    /// Access and intra-group delays, in microseconds.
    pub access_delay_us: (u64, u64),
    /// Lower bound of core to aggregation delays; the upper bound is just
    /// below the smallest backbone delay.
    pub core_delay_min_us: u64,
    /// Signal speed as a fraction of the speed of light.
    pub speed_fraction: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            merge_radius_km: 30.0,
            top_population_fraction: 0.30,
            priority_factor: 0.1,
            near_link_fraction: 0.20,
            min_reduction: 0.25,
            max_degree: 4,
            access_per_group: 30,
            groups_per_area: 10,
            cost_major: 1,
            cost_standard: 2,
            cost_optional: 5,
            cost_twin: 1,
            cost_core_agg: 10,
            cost_agg_access: 100,
            cost_agg_agg: 1000,
            access_delay_us: (100, 300),
            core_delay_min_us: 300,
            speed_fraction: 0.6,
            seed: 1,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), YarggError> {
        let fractions = [
            ("top_population_fraction", self.top_population_fraction),
            ("priority_factor", self.priority_factor),
            ("near_link_fraction", self.near_link_fraction),
            ("min_reduction", self.min_reduction),
            ("speed_fraction", self.speed_fraction),
        ];
        for (name, v) in fractions {
            if !(v > 0.0 && v <= 1.0) {
                return Err(YarggError::Config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if self.merge_radius_km < 0.0 {
            return Err(YarggError::Config("merge_radius_km must be non-negative".into()));
        }
        if self.groups_per_area == 0 {
            return Err(YarggError::Config("groups_per_area must be positive".into()));
        }
        if self.access_delay_us.0 > self.access_delay_us.1 {
            return Err(YarggError::Config("access_delay_us range is empty".into()));
        }
        let costs = [
            self.cost_major,
            self.cost_standard,
            self.cost_optional,
            self.cost_twin,
            self.cost_core_agg,
            self.cost_agg_access,
            self.cost_agg_agg,
        ];
        if costs.contains(&0) {
            return Err(YarggError::Config("link costs must be positive".into()));
        }
        Ok(())
    }

    /// Propagation delay over `km` of fiber, truncated to microseconds.
    pub fn delay_us(&self, km: f64) -> u64 {
        (km * 1e6 / (self.speed_fraction * LIGHT_KM_S)).floor() as u64
    }

    /// Number of routers in one generated area, core routers included.
    pub fn area_size(&self) -> usize {
        2 + self.groups_per_area * (2 + self.access_per_group)
    }
}

/// Which backbone construction step added a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkClass {
    SpanningTree,
    Biconnecting,
    Shortcut,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackboneLink {
    pub a: usize,
    pub b: usize,
    pub km: f64,
    pub class: LinkClass,
}

/// The backbone before and after doubling.
#[derive(Debug, Clone)]
pub struct Backbone {
    /// Cities after merging.
    pub cities: Vec<City>,
    /// City-level links, before doubling.
    pub links: Vec<BackboneLink>,
    /// Doubled backbone.
    pub graph: Graph,
    /// City index to its two core routers.
    pub pairs: Vec<[NodeId; 2]>,
}

impl Backbone {
    /// Smallest delay of a link between two different cities.
    pub fn min_intercity_delay_us(&self, cfg: &GenConfig) -> u64 {
        self.links.iter().map(|l| cfg.delay_us(l.km)).min().unwrap_or(0)
    }
}

/// Merges cities closer than the radius into the most populated one, which
/// keeps its name and position and gains the others' population.
pub fn merge_cities(table: &CityTable, radius_km: f64) -> CityTable {
    let n = table.cities.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&table.cities[a], &table.cities[b]);
        cb.population.cmp(&ca.population).then_with(|| ca.name.cmp(&cb.name))
    });
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        if owner[i].is_some() {
            continue;
        }
        owner[i] = Some(kept.len());
        for &j in &order {
            if owner[j].is_none() && table.distance(i, j) < radius_km {
                owner[j] = Some(kept.len());
            }
        }
        kept.push(i);
    }
    let mut cities: Vec<City> = kept.iter().map(|&i| City { population: 0, ..table.cities[i].clone() }).collect();
    for i in 0..n {
        cities[owner[i].expect("every city is assigned")].population += table.cities[i].population;
    }
    let road_km = table
        .road_km
        .as_ref()
        .map(|_| kept.iter().map(|&i| kept.iter().map(|&j| table.distance(i, j)).collect()).collect());
    CityTable { cities, road_km, road_factor: table.road_factor }
}

/// Disjoint-set forest for the spanning tree.
struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Cities whose populations, taken from the largest, first reach the
/// fraction of the total.
fn top_population_set(cities: &[City], fraction: f64) -> Vec<bool> {
    let total: u64 = cities.iter().map(|c| c.population).sum();
    let mut order: Vec<usize> = (0..cities.len()).collect();
    order.sort_by(|&a, &b| cities[b].population.cmp(&cities[a].population).then_with(|| cities[a].name.cmp(&cities[b].name)));
    let mut top = vec![false; cities.len()];
    let mut acc = 0u64;
    for i in order {
        if acc as f64 >= fraction * total as f64 {
            break;
        }
        top[i] = true;
        acc += cities[i].population;
    }
    top
}

/// Biconnected components (as vertex sets) and articulation points of an
/// undirected simple graph given by adjacency lists.
pub fn biconnected_components(adj: &[Vec<usize>]) -> (Vec<BTreeSet<usize>>, Vec<usize>) {
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();
    let mut is_cut = vec![false; n];
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (v, parent, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            if let Some(&(u, _, _)) = stack.last() {
                low[u] = low[u].min(low[v]);
                if low[v] >= disc[u] {
                    if u != root {
                        is_cut[u] = true;
                    }
                    let mut block = BTreeSet::new();
                    while let Some((a, b)) = edge_stack.pop() {
                        block.insert(a);
                        block.insert(b);
                        if (a, b) == (u, v) {
                            break;
                        }
                    }
                    blocks.push(block);
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    let cuts = (0..n).filter(|&v| is_cut[v]).collect();
    (blocks, cuts)
}

fn adjacency(n: usize, links: &[BackboneLink]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for l in links {
        adj[l.a].push(l.b);
        adj[l.b].push(l.a);
    }
    for row in &mut adj {
        row.sort_unstable();
        row.dedup();
    }
    adj
}

/// All-pairs shortest road distances over the current links.
fn road_shortest_paths(n: usize, links: &[BackboneLink]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for l in links {
        d[l.a][l.b] = d[l.a][l.b].min(l.km);
        d[l.b][l.a] = d[l.a][l.b];
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn min_max_scale(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect()
}

/// Builds the city-level backbone (steps 1 to 4) and doubles it.
pub fn build_backbone(table: &CityTable, cfg: &GenConfig) -> Result<Backbone, YarggError> {
    cfg.validate()?;
    let table = merge_cities(table, cfg.merge_radius_km);
    let n = table.cities.len();
    if n < 2 {
        return Err(YarggError::TooFewCities(n));
    }
    let cities = &table.cities;

    let top = top_population_set(cities, cfg.top_population_fraction);
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let km = table.distance(i, j);
            let w = if top[i] && top[j] { km * cfg.priority_factor } else { km };
            pairs.push((w, i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut dsu = Dsu((0..n).collect());
    let mut links: Vec<BackboneLink> = Vec::new();
    for &(_, i, j) in &pairs {
        if dsu.union(i, j) {
            links.push(BackboneLink { a: i, b: j, km: table.distance(i, j), class: LinkClass::SpanningTree });
        }
    }

    loop {
        let adj = adjacency(n, &links);
        let (blocks, cuts) = biconnected_components(&adj);
        if cuts.is_empty() {
            break;
        }
        let mut blocks_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                blocks_of[v].push(b);
            }
        }
        let share_block = |u: usize, v: usize| blocks_of[u].iter().any(|b| blocks_of[v].contains(b));
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&b| blocks[b].iter().next().copied());
        let mut added = false;
        for b in order {
            let mut best: Option<(f64, usize, usize)> = None;
            for &u in &blocks[b] {
                for v in 0..n {
                    if blocks[b].contains(&v) || share_block(u, v) {
                        continue;
                    }
                    let km = table.distance(u, v);
                    if best.is_none_or(|(bk, bu, bv)| km < bk || (km == bk && (u, v) < (bu, bv))) {
                        best = Some((km, u, v));
                    }
                }
            }
            if let Some((km, u, v)) = best {
                links.push(BackboneLink { a: u.min(v), b: u.max(v), km, class: LinkClass::Biconnecting });
                added = true;
                break;
            }
        }
        if !added {
            break;
        }
    }

    let max_km = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| table.distance(i, j))
        .fold(0.0, f64::max);
    loop {
        let adj = adjacency(n, &links);
        let sp = road_shortest_paths(n, &links);
        let mut cands: Vec<(usize, usize, f64, f64)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let km = table.distance(i, j);
                if adj[i].contains(&j)
                    || km >= cfg.near_link_fraction * max_km
                    || adj[i].len() >= cfg.max_degree
                    || adj[j].len() >= cfg.max_degree
                {
                    continue;
                }
                let reduction = (sp[i][j] - km) / sp[i][j];
                if reduction >= cfg.min_reduction {
                    cands.push((i, j, reduction, (cities[i].population + cities[j].population) as f64));
                }
            }
        }
        if cands.is_empty() {
            break;
        }
        let red = min_max_scale(&cands.iter().map(|c| c.2).collect::<Vec<_>>());
        let pop = min_max_scale(&cands.iter().map(|c| c.3).collect::<Vec<_>>());
        let key = |k: usize| {
            let (i, j, _, _) = cands[k];
            let (a, b) = (&cities[i].name, &cities[j].name);
            if a <= b { (a, b) } else { (b, a) }
        };
        let best = (0..cands.len())
            .max_by(|&x, &y| {
                (red[x] + pop[x]).total_cmp(&(red[y] + pop[y])).then_with(|| key(y).cmp(&key(x)))
            })
            .expect("non-empty");
        let (i, j, _, _) = cands[best];
        links.push(BackboneLink { a: i, b: j, km: table.distance(i, j), class: LinkClass::Shortcut });
    }

    let names = cities
        .iter()
        .flat_map(|c| [format!("{}-core1", c.name), format!("{}-core2", c.name)]);
    let mut graph = Graph::new(names);
    let twins: Vec<[NodeId; 2]> = (0..n as NodeId).map(|i| [2 * i, 2 * i + 1]).collect();
    for pair in &twins {
        graph.add_undirected(pair[0], pair[1], 0, cfg.cost_twin);
    }
    for l in &links {
        let cost = match l.class {
            LinkClass::SpanningTree => cfg.cost_major,
            LinkClass::Biconnecting => cfg.cost_standard,
            LinkClass::Shortcut => cfg.cost_optional,
        };
        let delay = cfg.delay_us(l.km);
        for (&a, &b) in twins[l.a].iter().zip(&twins[l.b]) {
            graph.add_undirected(a, b, delay, cost);
        }
    }
    Ok(Backbone { cities: table.cities.clone(), links, graph, pairs: twins })
}

/// Deterministic per-area seed.
fn area_seed(seed: u64, area: AreaId) -> u64 {
    let mut z = seed ^ (u64::from(area)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Names of the aggregation and access routers of one city's area, in
/// creation order.
fn area_names(city: &str, cfg: &GenConfig) -> Vec<String> {
    let mut names = Vec::with_capacity(cfg.area_size() - 2);
    for g in 1..=cfg.groups_per_area {
        names.push(format!("{city}-agg{g}-1"));
        names.push(format!("{city}-agg{g}-2"));
        for k in 1..=cfg.access_per_group {
            names.push(format!("{city}-acc{g}-{k}"));
        }
    }
    names
}

/// Adds the links of one area whose routers after the cores start at
/// `first` in `graph`. Returns the area's nodes, cores included.
pub fn build_area(
    graph: &mut Graph,
    cores: [NodeId; 2],
    first: NodeId,
    area: AreaId,
    min_backbone_delay_us: u64,
    cfg: &GenConfig,
) -> Vec<NodeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(area_seed(cfg.seed, area));
    let cap = min_backbone_delay_us.saturating_sub(1);
    let core_hi = cap;
    let core_lo = cfg.core_delay_min_us.min(core_hi);
    let acc_hi = cfg.access_delay_us.1.min(cap);
    let acc_lo = cfg.access_delay_us.0.min(acc_hi);
    let mut nodes = cores.to_vec();
    let mut next = first;
    for _ in 0..cfg.groups_per_area {
        let aggs = [next, next + 1];
        next += 2;
        nodes.extend(aggs);
        graph.add_undirected(aggs[0], aggs[1], rng.random_range(acc_lo..=acc_hi), cfg.cost_agg_agg);
        for &c in &cores {
            for &a in &aggs {
                graph.add_undirected(c, a, rng.random_range(core_lo..=core_hi), cfg.cost_core_agg);
            }
        }
        for _ in 0..cfg.access_per_group {
            let acc = next;
            next += 1;
            nodes.push(acc);
            for &a in &aggs {
                graph.add_undirected(a, acc, rng.random_range(acc_lo..=acc_hi), cfg.cost_agg_access);
            }
        }
    }
    nodes.sort_unstable();
    nodes
}

/// Backbone plus one area per city. Area ids: backbone 0, city `i` gets
/// `i + 1`.
pub fn generate_topology(table: &CityTable, cfg: &GenConfig) -> Result<MultiAreaGraph, YarggError> {
    let bb = build_backbone(table, cfg)?;
    Ok(assemble(&bb, cfg))
}

fn assemble(bb: &Backbone, cfg: &GenConfig) -> MultiAreaGraph {
    let mut names: Vec<String> = bb.graph.names().to_vec();
    for c in &bb.cities {
        names.extend(area_names(&c.name, cfg));
    }
    let mut graph = Graph::new(names);
    for l in bb.graph.links() {
        graph.add_link(l.src, l.dst, l.delay_us, l.cost);
    }
    let min_bb = bb.min_intercity_delay_us(cfg);
    let mut areas = BTreeMap::new();
    let mut abrs = BTreeMap::new();
    let mut first = bb.graph.node_count() as NodeId;
    for (i, &pair) in bb.pairs.iter().enumerate() {
        let area = i as AreaId + 1;
        areas.insert(area, build_area(&mut graph, pair, first, area, min_bb, cfg));
        abrs.insert(area, pair);
        first += (cfg.area_size() - 2) as NodeId;
    }
    areas.insert(BACKBONE, (0..bb.graph.node_count() as NodeId).collect());
    MultiAreaGraph { graph, areas, abrs }
}

/// Structural problems found by [`audit`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub articulation_points: Vec<String>,
    /// `None` when the doubled backbone is too large to check.
    pub triconnected: Option<bool>,
    pub area_sizes: BTreeMap<AreaId, usize>,
    /// Area links whose delay is not below the smallest backbone delay.
    pub slow_area_links: usize,
}

impl AuditReport {
    pub fn violations(&self, cfg: &GenConfig) -> Vec<String> {
        let mut v = Vec::new();
        if !self.articulation_points.is_empty() {
            v.push(format!("articulation points: {}", self.articulation_points.join(", ")));
        }
        if self.triconnected == Some(false) {
            v.push("doubled backbone is not 3-vertex-connected".into());
        }
        for (a, &size) in &self.area_sizes {
            if size != cfg.area_size() {
                v.push(format!("area {a} has {size} nodes instead of {}", cfg.area_size()));
            }
        }
        if self.slow_area_links > 0 {
            v.push(format!("{} area links are not faster than the backbone", self.slow_area_links));
        }
        v
    }
}

/// Whether removing any `k - 1` nodes leaves `g` connected. Exhaustive, so
/// only for small graphs.
pub fn is_k_vertex_connected(g: &Graph, k: usize) -> bool {
    let n = g.node_count();
    if n <= k {
        return false;
    }
    let mut removed = vec![false; n];
    fn rec(g: &Graph, removed: &mut [bool], from: usize, left: usize) -> bool {
        if left == 0 {
            let Some(root) = (0..removed.len()).find(|&u| !removed[u]) else { return true };
            let mut seen = removed.to_vec();
            seen[root] = true;
            let mut stack = vec![root as NodeId];
            while let Some(u) = stack.pop() {
                for l in g.out_links(u) {
                    if !seen[l.dst as usize] {
                        seen[l.dst as usize] = true;
                        stack.push(l.dst);
                    }
                }
            }
            return seen.iter().all(|&s| s);
        }
        for u in from..removed.len() {
            removed[u] = true;
            let ok = rec(g, removed, u + 1, left - 1);
            removed[u] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    (0..k).all(|r| rec(g, &mut removed, 0, r))
}

/// Checks the generator's structural guarantees on one generated topology.
pub fn audit(bb: &Backbone, mg: &MultiAreaGraph, cfg: &GenConfig) -> AuditReport {
    let adj = adjacency(bb.cities.len(), &bb.links);
    let (_, cuts) = biconnected_components(&adj);
    let min_bb = bb.min_intercity_delay_us(cfg);
    let slow_area_links = mg
        .graph
        .links()
        .iter()
        .filter(|l| !(mg.is_backbone(l.src) && mg.is_backbone(l.dst)))
        .filter(|l| l.delay_us >= min_bb)
        .count();
    AuditReport {
        articulation_points: cuts.iter().map(|&c| bb.cities[c].name.clone()).collect(),
        triconnected: (bb.cities.len() <= 20).then(|| is_k_vertex_connected(&bb.graph, 3)),
        area_sizes: mg.stub_areas().map(|a| (a, mg.areas[&a].len())).collect(),
        slow_area_links,
    }
}

/// Generates a topology and its backbone in one go, for auditing.
pub fn generate_with_backbone(table: &CityTable, cfg: &GenConfig) -> Result<(Backbone, MultiAreaGraph), YarggError> {
    let bb = build_backbone(table, cfg)?;
    let mg = assemble(&bb, cfg);
    Ok((bb, mg))
}

/// A deterministic synthetic city table: `n` cities scattered over a
/// square with heavy-tailed populations.
pub fn synthetic_cities(n: usize, side_km: f64, seed: u64) -> CityTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cities = (0..n)
        .map(|i| City {
            name: format!("city{i:03}"),
            x_km: rng.random_range(0.0..side_km),
            y_km: rng.random_range(0.0..side_km),
            population: 10_000 + (1_000_000.0 / (1.0 + i as f64).powf(1.1)) as u64 + rng.random_range(0..10_000),
        })
        .collect();
    CityTable { cities, road_km: None, road_factor: 1.0 }
}
