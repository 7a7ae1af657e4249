//! Matrix runner: compile once per (benchmark, binding, transform), then
//! allocate each config's repetitions.

use std::collections::BTreeMap;

use serde::Serialize;

use super::benchmarks::{benchmark, DEFAULT_SUITE};
use crate::affine::Binding;
use crate::codegen::GateStream;
use crate::gates::GateCatalog;
use crate::mapper::{allocate, build_topology, stream_depth, AllocOptions, Allocator, MapError, TOPOLOGIES};
use crate::par::{self, Execution};
use crate::pipeline::compile_source;
use crate::transform::{ScheduleOptions, TransformKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub benchmark: String,
    /// Overrides applied on top of the directive's own binding.
    pub binding: Binding,
    pub topology: String,
    pub transform: TransformKind,
    pub allocator: Allocator,
    pub reps: usize,
    pub base_seed: u64,
    pub directed: bool,
}

impl RunConfig {
    /// Benchmark label used in exports, e.g. `cheung` or `cheung[N=4]`.
    pub fn label(&self) -> String {
        if self.binding.0.is_empty() {
            self.benchmark.clone()
        } else {
            format!("{}[{}]", self.benchmark, self.binding)
        }
    }

    fn compile_key(&self) -> (String, String, TransformKind) {
        (self.benchmark.clone(), self.binding.to_string(), self.transform)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Timeout,
    CompileError,
    MapError,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::CompileError => "compile_error",
            Status::MapError => "map_error",
        }
    }
}

/// One allocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub benchmark: String,
    pub topology: String,
    pub transform: String,
    pub allocator: String,
    pub rep: usize,
    pub seed: u64,
    pub depth: Option<usize>,
    pub size: Option<usize>,
    pub added: Option<usize>,
    pub swaps: Option<usize>,
    pub reverses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alloc_time: Option<f64>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub config: RunConfig,
    pub logical_depth: Option<usize>,
    pub logical_size: Option<usize>,
    pub records: Vec<Record>,
    pub depth_mean: Option<f64>,
    pub depth_std: Option<f64>,
    pub size_mean: Option<f64>,
    pub size_std: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct MatrixOptions {
    pub exec: Execution,
    /// Record wall-clock allocation times (makes exports nondeterministic).
    pub timing: bool,
    pub alloc: AllocOptions,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        Self { exec: Execution::Parallel, timing: false, alloc: AllocOptions::default() }
    }
}

/// Population mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    Some((m, v.max(0.0).sqrt()))
}

pub fn compile_benchmark(
    name: &str,
    binding: &Binding,
    kind: TransformKind,
    exec: Execution,
) -> Result<GateStream, String> {
    let b = benchmark(name).ok_or_else(|| format!("unknown benchmark `{name}`"))?;
    let opts = ScheduleOptions { exec, ..ScheduleOptions::default() };
    compile_source(b.source, &GateCatalog::standard(), b.directive, Some(kind), binding, &opts)
        .map(|c| c.stream)
        .map_err(|e| e.to_string())
}

fn run_one(cfg: &RunConfig, compiled: &Result<GateStream, String>, opts: &MatrixOptions) -> RunResult {
    let blank = |rep: usize, status: Status| Record {
        benchmark: cfg.label(),
        topology: cfg.topology.clone(),
        transform: cfg.transform.name().to_string(),
        allocator: cfg.allocator.name().to_string(),
        rep,
        seed: cfg.base_seed + rep as u64,
        depth: None,
        size: None,
        added: None,
        swaps: None,
        reverses: None,
        alloc_time: None,
        status,
    };
    let reps = cfg.reps.max(1);
    let fail = |status: Status, msg: String| RunResult {
        config: cfg.clone(),
        logical_depth: None,
        logical_size: None,
        records: (0..reps).map(|r| blank(r, status)).collect(),
        depth_mean: None,
        depth_std: None,
        size_mean: None,
        size_std: None,
        error: Some(msg),
    };
    let stream = match compiled {
        Ok(s) => s,
        Err(e) => return fail(Status::CompileError, e.clone()),
    };
    let graph = match build_topology(&cfg.topology) {
        Ok(g) => g.directed(cfg.directed),
        Err(e) => return fail(Status::MapError, e.to_string()),
    };
    let mut records = Vec::with_capacity(reps);
    let mut error = None;
    for rep in 0..reps {
        let seed = cfg.base_seed + rep as u64;
        let mut rec = blank(rep, Status::Ok);
        match allocate(stream, &graph, cfg.allocator, seed, &opts.alloc) {
            Ok((_, m)) => {
                rec.depth = Some(m.depth);
                rec.size = Some(m.size);
                rec.added = Some(m.added_gates);
                rec.swaps = Some(m.swaps);
                rec.reverses = Some(m.reverses);
                rec.alloc_time = opts.timing.then_some(m.alloc_time);
            }
            Err(e) => {
                rec.status = if e == MapError::Timeout { Status::Timeout } else { Status::MapError };
                error = Some(e.to_string());
            }
        }
        records.push(rec);
    }
    let depths: Vec<f64> = records.iter().filter_map(|r| r.depth).map(|d| d as f64).collect();
    let sizes: Vec<f64> = records.iter().filter_map(|r| r.size).map(|d| d as f64).collect();
    let d = mean_std(&depths);
    let s = mean_std(&sizes);
    RunResult {
        config: cfg.clone(),
        logical_depth: Some(stream_depth(stream)),
        logical_size: Some(stream.len()),
        records,
        depth_mean: d.map(|x| x.0),
        depth_std: d.map(|x| x.1),
        size_mean: s.map(|x| x.0),
        size_std: s.map(|x| x.1),
        error,
    }
}

/// Run every config. Failures are recorded per config; results come back
/// in canonical order regardless of execution mode.
pub fn run_matrix(configs: &[RunConfig], opts: &MatrixOptions) -> Vec<RunResult> {
    let mut keys: Vec<(String, String, TransformKind)> = configs.iter().map(RunConfig::compile_key).collect();
    keys.sort();
    keys.dedup();
    let by_key: BTreeMap<(String, String, TransformKind), &RunConfig> =
        configs.iter().map(|c| (c.compile_key(), c)).collect();
    // inner compiles stay sequential; the fan-out happens across keys
    let compiled = par::map(opts.exec, &keys, |k| {
        let c = by_key[k];
        compile_benchmark(&c.benchmark, &c.binding, c.transform, Execution::Sequential)
    });
    let cache: BTreeMap<_, _> = keys.into_iter().zip(compiled).collect();
    let mut results = par::map(opts.exec, configs, |c| run_one(c, &cache[&c.compile_key()], opts));
    results.sort_by_key(|r| canonical_key(&r.config));
    results
}

fn canonical_key(c: &RunConfig) -> impl Ord {
    let params: Vec<(String, i64)> = c.binding.0.iter().map(|(k, v)| (k.clone(), *v)).collect();
    (c.benchmark.clone(), params, c.topology.clone(), c.transform, c.allocator, c.directed, c.base_seed, c.reps)
}

fn configs_for(
    benchmarks: &[&str],
    bindings: &[Binding],
    allocators: &[Allocator],
    reps: usize,
    seed: u64,
) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for b in benchmarks {
        for binding in bindings {
            for t in TOPOLOGIES {
                for k in TransformKind::ALL {
                    for &a in allocators {
                        out.push(RunConfig {
                            benchmark: b.to_string(),
                            binding: binding.clone(),
                            topology: t.to_string(),
                            transform: k,
                            allocator: a,
                            reps,
                            base_seed: seed,
                            directed: false,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Eight benchmarks at their default bindings, every topology, transform
/// and allocator.
pub fn default_suite(reps: usize, seed: u64) -> Vec<RunConfig> {
    configs_for(DEFAULT_SUITE, &[Binding::new()], &Allocator::ALL, reps, seed)
}

pub const SCALING_SIZES: [i64; 6] = [2, 4, 6, 8, 10, 12];

/// cheung and pipelined swept over `N`, with the two deterministic allocators.
pub fn scaling_suite(reps: usize, seed: u64) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for name in ["cheung", "pipelined"] {
        let b = benchmark(name).expect("bundled benchmark");
        let bindings: Vec<Binding> = SCALING_SIZES.iter().map(|&n| b.scaled(n)).collect();
        out.extend(configs_for(&[name], &bindings, &[Allocator::Trivial, Allocator::WpmLite], reps, seed));
    }
    out
}
