use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use segpath_core::{reconstruct_segments, FrontEntry, Graph, ParetoFront3D, SegKind, Segment, SegmentList, SrGraph};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SegmentOut {
    pub kind: SegKind,
    pub from: String,
    pub to: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub link_index: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EntryOut {
    pub delay_units: u64,
    pub delay_us: u64,
    pub cost: u64,
    pub segments: Vec<SegmentOut>,
}

/// Fronts from one source, keyed by destination name then segment budget.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultOut {
    pub src: String,
    pub c0: usize,
    pub gamma: u64,
    pub fronts: BTreeMap<String, BTreeMap<String, Vec<EntryOut>>>,
}

pub fn segment_out(g: &Graph, s: &Segment) -> SegmentOut {
    SegmentOut { kind: s.kind, from: g.name(s.from).into(), to: g.name(s.to).into(), link_index: s.link_index }
}

pub fn entry_out(g: &Graph, e: &FrontEntry, segs: &SegmentList) -> EntryOut {
    EntryOut {
        delay_units: e.delay_units,
        delay_us: e.delay_us,
        cost: e.cost,
        segments: segs.segments.iter().map(|s| segment_out(g, s)).collect(),
    }
}

pub fn result_out(g: &Graph, sr: Option<&SrGraph>, front: &ParetoFront3D, gamma: u64) -> ResultOut {
    let mut fronts = BTreeMap::new();
    for d in 0..g.node_count() as u32 {
        let mut levels = BTreeMap::new();
        for i in 0..=front.c0() {
            let entries = front
                .front(i, d)
                .iter()
                .map(|e| entry_out(g, e, &reconstruct_segments(front, sr, d, e)))
                .collect();
            levels.insert(i.to_string(), entries);
        }
        fronts.insert(g.name(d).to_string(), levels);
    }
    ResultOut { src: g.name(front.src()).into(), c0: front.c0(), gamma, fronts }
}

fn segments_cell(segs: &[SegmentOut]) -> String {
    let mut s = String::new();
    for (k, seg) in segs.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        match seg.kind {
            SegKind::Node => write!(s, "node:{}>{}", seg.from, seg.to),
            SegKind::Adj => write!(s, "adj:{}>{}#{}", seg.from, seg.to, seg.link_index.unwrap_or(0)),
        }
        .expect("writing to a string cannot fail");
    }
    s
}

pub const RESULT_CSV_HEADER: &str = "src,dst,level,delay_units,delay_us,cost,segments\n";

pub fn result_csv_rows(r: &ResultOut) -> String {
    let mut out = String::new();
    for (dst, levels) in &r.fronts {
        let mut by_level: Vec<(usize, &Vec<EntryOut>)> =
            levels.iter().map(|(k, v)| (k.parse().unwrap_or(usize::MAX), v)).collect();
        by_level.sort_by_key(|(k, _)| *k);
        for (level, entries) in by_level {
            for e in entries {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.src,
                    dst,
                    level,
                    e.delay_units,
                    e.delay_us,
                    e.cost,
                    segments_cell(&e.segments)
                )
                .expect("writing to a string cannot fail");
            }
        }
    }
    out
}

/// Timings and instance statistics of one run.
#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub build_sr_ms: f64,
    pub solve_ms: f64,
    /// Time spent combining per-area results (multi-area runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub products_ms: Option<f64>,
    pub threads: usize,
    pub nodes: usize,
    pub sr_edges: usize,
    /// Average number of segments per ordered node pair (flat runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<f64>,
    pub gamma_capacity: u64,
    pub peak_extend_list: usize,
    pub sources: usize,
    pub front_entries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lossless: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary_entries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary_bytes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_path: Option<PathBuf>,
}

/// Writes `text` to `path`, or to stdout without one.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
