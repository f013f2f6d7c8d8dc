use std::fmt::Write as _;
use std::time::Instant;

use segpath_core::multiarea::{best2cope_with, MultiAreaContext};
use segpath_core::oracle::{brute_force_fronts_with, BruteForceLimits};
use segpath_core::solver::{query_2cop_free_last, SolveStats};
use segpath_core::topology::random::{erdos_renyi, RandomGraphParams};
use segpath_core::topology::{graph_to_json, multiarea_to_json, parse_topology, Topology, TopologyFormat};
use segpath_core::yargg::{generate_topology, synthetic_cities, CityTable, GenConfig};
use segpath_core::{
    best2cop, build_sr_graph, compare_fronts, mc_dijkstra_solve, query_2cop, reconstruct_segments, DelayKey,
    DiscretizationConfig, FrontEntry, Graph, MultiAreaConfig, MultiAreaGraph, NodeId, Objective, ParetoFront3D,
    Segment, SegmentList, SolverConfig, SrGraph,
};

use crate::args::{
    BenchArgs, CompareArgs, Format, GenerateArgs, GeneratorKind, ObjectiveArg, QueryArgs, SolveArgs, SolverOpts,
    StressArgs,
};
use crate::output::{emit, entry_out, result_csv_rows, result_out, ResultOut, RunReport, RESULT_CSV_HEADER};
use crate::Failure;

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?)
}

pub fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let text = match a.kind {
        GeneratorKind::Random => {
            let mut params = RandomGraphParams::evaluation(a.nodes);
            if let Some(d) = a.degree {
                params.avg_degree = d;
            }
            graph_to_json(&erdos_renyi(&params, a.seed))
        }
        GeneratorKind::Yargg => {
            let table = match (&a.cities, a.synthetic_cities) {
                (Some(path), _) => CityTable::from_csv_path(path)?,
                (None, Some(n)) => synthetic_cities(n, 1000.0, a.seed),
                (None, None) => return Err(Failure::Invalid("yargg needs --cities or --synthetic-cities".into())),
            };
            let cfg = GenConfig { groups_per_area: a.groups, access_per_group: a.access, seed: a.seed, ..GenConfig::default() };
            multiarea_to_json(&generate_topology(&table, &cfg)?)
        }
    };
    emit(a.out.as_deref(), &(text + "\n"))?;
    Ok(())
}

/// A parsed topology with everything needed to solve on it.
struct Instance {
    graph: Graph,
    mg: Option<MultiAreaGraph>,
    disc: DiscretizationConfig,
    solver: SolverConfig,
}

impl Instance {
    fn load(opts: &SolverOpts) -> Result<Self, Failure> {
        let format = if opts.multiarea { TopologyFormat::MultiArea } else { TopologyFormat::Flat };
        let (graph, mg) = match parse_topology(&opts.topology, format)? {
            Topology::Flat(g) => (g, None),
            Topology::MultiArea(mg) => (mg.graph.clone(), Some(mg)),
        };
        let mut disc = DiscretizationConfig::new(opts.c1_ms, opts.gamma)?;
        if let Some(t) = opts.trueness_us {
            disc = disc.with_trueness(t);
        }
        let solver = SolverConfig::new(opts.msd, disc.gamma_capacity())
            .with_threads(opts.threads.max(1))
            .with_k_per_cell(opts.k_per_cell)
            .with_cost_limit(opts.c2.unwrap_or(u64::MAX));
        Ok(Instance { graph, mg, disc, solver })
    }

    fn node(&self, name: &str) -> Result<NodeId, Failure> {
        self.graph.id_of(name).ok_or_else(|| Failure::Invalid(format!("unknown node {name}")))
    }

    fn sources(&self, name: Option<&str>) -> Result<Vec<NodeId>, Failure> {
        match name {
            Some(n) => Ok(vec![self.node(n)?]),
            None => Ok((0..self.graph.node_count() as NodeId).collect()),
        }
    }

    fn build_sr(&self) -> Result<SrGraph, Failure> {
        let p = pool(self.solver.threads)?;
        Ok(p.install(|| build_sr_graph(&self.graph, &self.disc))?)
    }

    fn multiarea_context(&self) -> Result<MultiAreaContext<'_>, Failure> {
        let mg = self.mg.as_ref().ok_or_else(|| Failure::Invalid("best2cope needs --multiarea".into()))?;
        Ok(MultiAreaContext::new(mg, MultiAreaConfig::new(self.disc, self.solver))?)
    }
}

pub fn solve(a: SolveArgs) -> Result<(), Failure> {
    let inst = Instance::load(&a.solver)?;
    let sources = inst.sources(a.source.as_deref())?;
    let mut report = RunReport {
        threads: inst.solver.threads,
        nodes: inst.graph.node_count(),
        gamma_capacity: inst.disc.gamma_capacity(),
        lossless: inst.disc.is_lossless(),
        sources: sources.len(),
        ..RunReport::default()
    };
    let mut results = Vec::new();
    if inst.mg.is_some() {
        let start = Instant::now();
        let ctx = inst.multiarea_context()?;
        report.build_sr_ms = ms(start);
        report.sr_edges = ctx.sr_edge_count();
        let start = Instant::now();
        let mut products = 0.0;
        for &src in &sources {
            let (front, r) = best2cope_with(&ctx, src)?;
            products += r.combine_ms;
            report.summary_entries = Some(r.summary_entries);
            report.summary_bytes = Some(r.summary_bytes);
            report.front_entries += front.entry_count();
            results.push(result_out(&inst.graph, None, &front, inst.disc.gamma));
        }
        report.solve_ms = ms(start);
        report.products_ms = Some(products);
    } else {
        let start = Instant::now();
        let sr = inst.build_sr()?;
        report.build_sr_ms = ms(start);
        report.sr_edges = sr.edge_count();
        report.parallelism = Some(sr.parallelism());
        if let Some(path) = &a.dump_sr {
            std::fs::write(path, sr.to_json(&inst.graph))?;
        }
        let start = Instant::now();
        for &src in &sources {
            let front = best2cop(&sr, src, &inst.solver)?;
            report.peak_extend_list = report.peak_extend_list.max(front.stats.peak_extend_entries);
            report.front_entries += front.entry_count();
            results.push(result_out(&inst.graph, Some(&sr), &front, inst.disc.gamma));
        }
        report.solve_ms = ms(start);
    }
    let text = match a.format {
        Format::Json if results.len() == 1 => serde_json::to_string_pretty(&results[0])?,
        Format::Json => serde_json::to_string_pretty(&results)?,
        Format::Csv => {
            let mut s = RESULT_CSV_HEADER.to_string();
            for r in &results {
                s.push_str(&result_csv_rows(r));
            }
            s
        }
    };
    emit(a.out.as_deref(), &(text.trim_end().to_string() + "\n"))?;
    report.result_path = a.out.clone();
    let rep = serde_json::to_string_pretty(&report)?;
    match &a.report {
        Some(p) => std::fs::write(p, rep + "\n")?,
        None => eprintln!("{rep}"),
    }
    Ok(())
}

fn solve_one(inst: &Instance, src: NodeId) -> Result<(ParetoFront3D, Option<SrGraph>), Failure> {
    if inst.mg.is_some() {
        let ctx = inst.multiarea_context()?;
        Ok((best2cope_with(&ctx, src)?.0, None))
    } else {
        let sr = inst.build_sr()?;
        let front = best2cop(&sr, src, &inst.solver)?;
        Ok((front, Some(sr)))
    }
}

pub fn query(a: QueryArgs) -> Result<(), Failure> {
    let inst = Instance::load(&a.solver)?;
    let (src, dst) = (inst.node(&a.source)?, inst.node(&a.dest)?);
    let (front, sr) = solve_one(&inst, src)?;
    let objective = match a.objective {
        ObjectiveArg::M0 => Objective::M0,
        ObjectiveArg::M1 => Objective::M1,
        ObjectiveArg::M2 => Objective::M2,
    };
    let c0p = a.max_segments.unwrap_or(inst.solver.c0);
    let c1p = a.max_delay_units.unwrap_or(inst.solver.c1_units);
    let c2p = a.max_cost.unwrap_or(u64::MAX);
    let answer = if a.free_last_nodeseg {
        query_2cop_free_last(&front, sr.as_ref(), objective, c0p, c1p, c2p, dst)
    } else {
        query_2cop(&front, objective, c0p, c1p, c2p, dst)
    };
    let answer = answer.map(|ans| {
        let segs = reconstruct_segments(&front, sr.as_ref(), dst, &ans.entry);
        (ans.level, entry_out(&inst.graph, &ans.entry, &segs))
    });
    let text = match a.format {
        Format::Json => {
            let value = match &answer {
                Some((level, e)) => serde_json::json!({"found": true, "level": level, "answer": e}),
                None => serde_json::json!({"found": false}),
            };
            serde_json::to_string_pretty(&value)?
        }
        Format::Csv => {
            let mut s = String::from("found,level,delay_units,delay_us,cost,segments\n");
            match &answer {
                Some((level, e)) => {
                    let segs: Vec<String> = e.segments.iter().map(|s| format!("{}>{}", s.from, s.to)).collect();
                    writeln!(s, "true,{level},{},{},{},{}", e.delay_units, e.delay_us, e.cost, segs.join(" "))?;
                }
                None => s.push_str("false,,,,,\n"),
            }
            s
        }
    };
    emit(None, &(text.trim_end().to_string() + "\n"))?;
    Ok(())
}

/// Fronts of one engine for one source.
enum Engine {
    Best2cop,
    Best2cope,
    Oracle,
    LabelCorrecting,
    File(Vec<ResultOut>),
}

impl Engine {
    fn parse(spec: &str) -> Result<Self, Failure> {
        Ok(match spec {
            "best2cop" | "solver" => Engine::Best2cop,
            "best2cope" | "multiarea" => Engine::Best2cope,
            "oracle" | "brute-force" => Engine::Oracle,
            "mc" | "label-correcting" => Engine::LabelCorrecting,
            path => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Invalid(format!("{path} is neither an engine nor a readable file: {e}")))?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                let results = if value.is_array() {
                    serde_json::from_value(value)?
                } else {
                    vec![serde_json::from_value(value)?]
                };
                Engine::File(results)
            }
        })
    }
}

/// Rebuilds a front from a result file.
fn front_from_result(g: &Graph, r: &ResultOut) -> Result<ParetoFront3D, Failure> {
    let id = |name: &str| g.id_of(name).ok_or_else(|| Failure::Invalid(format!("unknown node {name} in result")));
    let src = id(&r.src)?;
    let n = g.node_count();
    let mut levels = vec![vec![Vec::new(); n]; r.c0 + 1];
    for (dst, by_level) in &r.fronts {
        let d = id(dst)? as usize;
        for (level, entries) in by_level {
            let i: usize = level.parse().map_err(|_| Failure::Invalid(format!("bad level {level}")))?;
            if i > r.c0 {
                return Err(Failure::Invalid(format!("level {i} above c0 {}", r.c0)));
            }
            for e in entries {
                let mut segs = SegmentList::default();
                for s in &e.segments {
                    let seg = Segment { kind: s.kind, from: id(&s.from)?, to: id(&s.to)?, link_index: s.link_index };
                    segs.segments.push(seg);
                }
                segs.delay_units = e.delay_units;
                segs.delay_us = e.delay_us;
                segs.cost = e.cost;
                let entry = FrontEntry {
                    delay_units: e.delay_units,
                    delay_us: e.delay_us,
                    cost: e.cost,
                    segments: e.segments.len() as u32,
                    origin: segpath_core::solver::Origin::Source,
                };
                levels[i][d].push((entry, segs));
            }
        }
    }
    Ok(ParetoFront3D::from_explicit(src, n, levels))
}

struct Engines<'a> {
    inst: &'a Instance,
    sr: Option<SrGraph>,
    ctx: Option<MultiAreaContext<'a>>,
}

impl<'a> Engines<'a> {
    fn new(inst: &'a Instance, engines: &[&Engine]) -> Result<Self, Failure> {
        let needs_sr = engines.iter().any(|e| matches!(e, Engine::Best2cop | Engine::Oracle | Engine::LabelCorrecting));
        let sr = if needs_sr { Some(inst.build_sr()?) } else { None };
        let ctx = if engines.iter().any(|e| matches!(e, Engine::Best2cope)) { Some(inst.multiarea_context()?) } else { None };
        Ok(Engines { inst, sr, ctx })
    }

    fn run(&self, engine: &Engine, src: NodeId, key: DelayKey) -> Result<ParetoFront3D, Failure> {
        let cfg = &self.inst.solver;
        Ok(match engine {
            Engine::Best2cop => best2cop(self.sr.as_ref().expect("built"), src, cfg)?,
            Engine::Best2cope => best2cope_with(self.ctx.as_ref().expect("built"), src)?.0,
            Engine::Oracle => brute_force_fronts_with(
                self.sr.as_ref().expect("built"),
                src,
                cfg.c0,
                cfg.c1_units,
                cfg.c2,
                key,
                BruteForceLimits::default(),
            )?,
            Engine::LabelCorrecting => mc_dijkstra_solve(&self.inst.graph, self.sr.as_ref().expect("built"), cfg, src),
            Engine::File(results) => {
                let name = self.inst.graph.name(src);
                let r = results
                    .iter()
                    .find(|r| r.src == name)
                    .ok_or_else(|| Failure::Invalid(format!("result file has no fronts from {name}")))?;
                front_from_result(&self.inst.graph, r)?
            }
        })
    }
}

pub fn compare(a: CompareArgs) -> Result<(), Failure> {
    let inst = Instance::load(&a.solver)?;
    let (ea, eb) = (Engine::parse(&a.a)?, Engine::parse(&a.b)?);
    let sources = match (&a.source, &ea, &eb) {
        (Some(_), _, _) => inst.sources(a.source.as_deref())?,
        (None, Engine::File(r), _) | (None, _, Engine::File(r)) => {
            r.iter().map(|r| inst.node(&r.src)).collect::<Result<_, _>>()?
        }
        (None, _, _) => inst.sources(None)?,
    };
    let key = if a.exact { DelayKey::Exact } else { DelayKey::Units };
    let engines = Engines::new(&inst, &[&ea, &eb])?;
    let mut diffs = Vec::new();
    let mut mismatches = 0;
    for &src in &sources {
        let fa = engines.run(&ea, src, key)?;
        let fb = engines.run(&eb, src, key)?;
        let diff = compare_fronts(&fa, &fb, key);
        if !diff.is_empty() {
            mismatches += diff.mismatch_count();
            diffs.push(serde_json::json!({"src": inst.graph.name(src), "diff": diff}));
        }
    }
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "a": a.a,
            "b": a.b,
            "sources": sources.len(),
            "mismatches": mismatches,
            "diffs": diffs,
        }))?,
        Format::Csv => format!("a,b,sources,mismatches\n{},{},{},{}", a.a, a.b, sources.len(), mismatches),
    };
    emit(None, &(text + "\n"))?;
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(Failure::Differ)
    }
}

pub fn bench(a: BenchArgs) -> Result<(), Failure> {
    let inst = Instance::load(&a.solver)?;
    let n = inst.graph.node_count();
    let count = a.sources.unwrap_or(n).clamp(1, n.max(1));
    let sources: Vec<NodeId> = (0..count).map(|k| (k * n / count) as NodeId).collect();
    let mut csv = String::from("source,|V|,threads,build_ms,solve_ms,front_entries\n");
    let threads = inst.solver.threads;
    if inst.mg.is_some() {
        let start = Instant::now();
        let ctx = inst.multiarea_context()?;
        let build_ms = ms(start);
        for src in sources {
            let start = Instant::now();
            let (front, _) = best2cope_with(&ctx, src)?;
            let solve_ms = ms(start);
            writeln!(csv, "{},{n},{threads},{build_ms:.3},{solve_ms:.3},{}", inst.graph.name(src), front.entry_count())?;
        }
    } else {
        let start = Instant::now();
        let sr = inst.build_sr()?;
        let build_ms = ms(start);
        for src in sources {
            let start = Instant::now();
            let front = best2cop(&sr, src, &inst.solver)?;
            let solve_ms = ms(start);
            writeln!(csv, "{},{n},{threads},{build_ms:.3},{solve_ms:.3},{}", inst.graph.name(src), front.entry_count())?;
        }
    }
    emit(a.out.as_deref(), &csv)?;
    Ok(())
}

#[derive(serde::Serialize)]
struct StressReport {
    nodes: usize,
    source: String,
    threads: usize,
    single_thread_ms: f64,
    multi_thread_ms: f64,
    speedup: f64,
    identical: bool,
    iterations: usize,
    extensions: u64,
}

pub fn stress(a: StressArgs) -> Result<(), Failure> {
    let graph = match &a.topology {
        Some(path) => match parse_topology(path, TopologyFormat::Flat)? {
            Topology::Flat(g) => g,
            Topology::MultiArea(mg) => mg.graph,
        },
        None => erdos_renyi(&RandomGraphParams::evaluation(a.nodes), a.seed),
    };
    let disc = DiscretizationConfig::new(a.c1_ms, a.gamma)?;
    let sr = build_sr_graph(&graph, &disc)?;
    let src = match &a.source {
        Some(name) => graph.id_of(name).ok_or_else(|| Failure::Invalid(format!("unknown node {name}")))?,
        None => 0,
    };
    let base = SolverConfig::new(a.msd, disc.gamma_capacity()).with_stress(true);
    let run = |threads: usize| -> Result<(ParetoFront3D, f64), Failure> {
        let start = Instant::now();
        let front = best2cop(&sr, src, &base.with_threads(threads))?;
        Ok((front, ms(start)))
    };
    let (single, single_ms) = run(1)?;
    let (multi, multi_ms) = run(a.threads.max(1))?;
    let stats: &SolveStats = &single.stats;
    let report = StressReport {
        nodes: graph.node_count(),
        source: graph.name(src).into(),
        threads: a.threads.max(1),
        single_thread_ms: single_ms,
        multi_thread_ms: multi_ms,
        speedup: single_ms / multi_ms.max(1e-9),
        identical: single.canonical_json() == multi.canonical_json(),
        iterations: stats.iterations,
        extensions: stats.total_extensions(),
    };
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Csv => format!(
            "nodes,source,threads,single_thread_ms,multi_thread_ms,speedup,identical,iterations,extensions\n{},{},{},{:.3},{:.3},{:.3},{},{},{}",
            report.nodes,
            report.source,
            report.threads,
            report.single_thread_ms,
            report.multi_thread_ms,
            report.speedup,
            report.identical,
            report.iterations,
            report.extensions
        ),
    };
    emit(None, &(text + "\n"))?;
    if report.identical {
        Ok(())
    } else {
        Err(Failure::Differ)
    }
}

