//! Summary tables and flat-file exports.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::Serialize;

use super::run::{Record, RunResult};
use crate::mapper::Allocator;
use crate::transform::TransformKind;

/// Geometric mean of the strictly positive entries.
pub fn geomean(xs: &[f64]) -> Option<f64> {
    let pos: Vec<f64> = xs.iter().copied().filter(|x| *x > 0.0).collect();
    if pos.is_empty() {
        return None;
    }
    Some((pos.iter().map(|x| x.ln()).sum::<f64>() / pos.len() as f64).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub topology: String,
    pub transform: TransformKind,
    pub allocator: Allocator,
    /// Configs contributing a mean depth.
    pub configs: usize,
    pub geomean_depth: Option<f64>,
    pub geomean_added: Option<f64>,
}

/// Depth spread across transforms for one benchmark on one topology with
/// one allocator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub benchmark: String,
    pub topology: String,
    pub allocator: Allocator,
    pub max_depth: f64,
    pub max_transform: TransformKind,
    pub min_depth: f64,
    pub min_transform: TransformKind,
    /// `(max - min) / max`, in `[0, 1]`.
    pub gap: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
    pub gaps: Vec<GapRow>,
}

pub fn summarize(results: &[RunResult]) -> SummaryTable {
    type Cell = (Vec<f64>, Vec<f64>);
    let mut cells: BTreeMap<(String, TransformKind, Allocator), Cell> = BTreeMap::new();
    let mut clusters: BTreeMap<(String, String, Allocator), Vec<(TransformKind, f64)>> = BTreeMap::new();
    for r in results {
        let c = &r.config;
        let cell = cells.entry((c.topology.clone(), c.transform, c.allocator)).or_default();
        let Some(d) = r.depth_mean else { continue };
        assert!(d > 0.0, "mapped depth must be positive");
        cell.0.push(d);
        let added: Vec<f64> = r.records.iter().filter_map(|x| x.added).map(|a| a as f64).collect();
        if let Some((m, _)) = super::run::mean_std(&added) {
            cell.1.push(m);
        }
        clusters.entry((c.label(), c.topology.clone(), c.allocator)).or_default().push((c.transform, d));
    }
    let rows = cells
        .into_iter()
        .map(|((topology, transform, allocator), (d, a))| SummaryRow {
            topology,
            transform,
            allocator,
            configs: d.len(),
            geomean_depth: geomean(&d),
            geomean_added: geomean(&a),
        })
        .collect();
    let gaps = clusters
        .into_iter()
        .map(|((benchmark, topology, allocator), v)| {
            let max = v.iter().copied().fold(v[0], |a, b| if b.1 > a.1 { b } else { a });
            let min = v.iter().copied().fold(v[0], |a, b| if b.1 < a.1 { b } else { a });
            GapRow {
                benchmark,
                topology,
                allocator,
                max_depth: max.1,
                max_transform: max.0,
                min_depth: min.1,
                min_transform: min.0,
                gap: (max.1 - min.1) / max.1,
            }
        })
        .collect();
    SummaryTable { rows, gaps }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

pub const CSV_COLUMNS: [&str; 13] = [
    "benchmark",
    "topology",
    "transform",
    "allocator",
    "rep",
    "seed",
    "depth",
    "size",
    "added",
    "swaps",
    "reverses",
    "alloc_time",
    "status",
];

pub fn records(results: &[RunResult]) -> impl Iterator<Item = &Record> {
    results.iter().flat_map(|r| r.records.iter())
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV export. `alloc_time` is written only when `timing` is set, which
/// keeps untimed exports byte-identical across runs.
pub fn to_csv(results: &[RunResult], timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = CSV_COLUMNS.iter().copied().filter(|c| timing || *c != "alloc_time").collect();
    w.write_record(&header).expect("in-memory write");
    for r in records(results) {
        let mut row = vec![
            r.benchmark.clone(),
            r.topology.clone(),
            r.transform.clone(),
            r.allocator.clone(),
            r.rep.to_string(),
            r.seed.to_string(),
            opt(r.depth),
            opt(r.size),
            opt(r.added),
            opt(r.swaps),
            opt(r.reverses),
        ];
        if timing {
            row.push(r.alloc_time.map(|t| format!("{t:.6}")).unwrap_or_default());
        }
        row.push(r.status.name().to_string());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn to_json(results: &[RunResult]) -> String {
    let recs: Vec<&Record> = records(results).collect();
    serde_json::to_string_pretty(&recs).expect("records serialize") + "\n"
}

pub fn export(results: &[RunResult], format: Format, timing: bool, path: &Path) -> io::Result<()> {
    let text = match format {
        Format::Csv => to_csv(results, timing),
        Format::Json => to_json(results),
    };
    std::fs::write(path, text)
}

/// Plain-text rendering of a summary for terminals.
pub fn summary_text(t: &SummaryTable) -> String {
    let f = |x: Option<f64>| x.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
    let mut s = format!(
        "{:<12} {:<10} {:<11} {:>7} {:>12} {:>12}\n",
        "topology", "transform", "allocator", "configs", "gm_depth", "gm_added"
    );
    for r in &t.rows {
        s.push_str(&format!(
            "{:<12} {:<10} {:<11} {:>7} {:>12} {:>12}\n",
            r.topology,
            r.transform.name(),
            r.allocator.name(),
            r.configs,
            f(r.geomean_depth),
            f(r.geomean_added)
        ));
    }
    if !t.gaps.is_empty() {
        let gaps: Vec<f64> = t.gaps.iter().map(|g| g.gap).collect();
        let nonzero = gaps.iter().filter(|g| **g > 0.0).count();
        let max = gaps.iter().copied().fold(0.0, f64::max);
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        s.push_str(&format!(
            "transform depth gap: {nonzero}/{} clusters nonzero, mean {:.1}%, max {:.1}%\n",
            gaps.len(),
            100.0 * mean,
            100.0 * max
        ));
    }
    s
}
