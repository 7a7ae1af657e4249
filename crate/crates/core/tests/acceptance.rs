//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use paqc::axl::load;
use paqc::codegen::GateStream;
use paqc::deps::compute_instance_deps;
use paqc::gates::Space;
use paqc::harness::*;
use paqc::mapper::*;
use paqc::par::{self, Execution};
use paqc::scop::assemble;
use paqc::transform::{check_legality, ScheduleOptions};
use paqc::{compile_program, compile_source, Binding, GateCatalog, TransformKind};

type Outcome = Result<String, String>;

fn compile(name: &str, k: Option<TransformKind>, directive: usize) -> Result<paqc::Compiled, String> {
    let b = benchmark(name).ok_or("unknown benchmark")?;
    compile_source(b.source, &GateCatalog::standard(), directive, k, &Binding::new(), &ScheduleOptions::default())
        .map_err(|e| format!("{name}: {e}"))
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    check(t.elapsed() <= limit, format!("took {:.2?}, limit {:?}", t.elapsed(), limit))
}

fn parity_golden() -> Outcome {
    let t = Instant::now();
    let fused = compile("parity", None, 0)?;
    let split = compile("parity", None, 1)?;
    let want_fused = "for (int c0 = 1; c0 <= 8; c0 += 1) {\n  X[c0];\n  CX[c0][0];\n}\n";
    let want_split =
        "for (int c1 = 1; c1 <= 8; c1 += 1) {\n  X[c1];\n}\nfor (int c1 = 1; c1 <= 8; c1 += 1) {\n  CX[c1][0];\n}\n";
    check(
        fused.solution.transform == TransformKind::PlutoMax && fused.loops() == want_fused,
        "plutomax listing differs",
    )?;
    check(
        split.solution.transform == TransformKind::PlutoMin && split.loops() == want_split,
        "plutomin listing differs",
    )?;
    within(t, Duration::from_secs(1))?;
    Ok("plutomin: two loops, plutomax: one fused loop (X then CX)".into())
}

fn assembly_golden() -> Outcome {
    let p = load(benchmark("parity").unwrap().source, &GateCatalog::standard()).map_err(|e| e.to_string())?;
    let render = |k: usize| -> Vec<String> { assemble(&p, k).nodes.iter().map(|n| n.schedule.to_string()).collect() };
    check(render(0) == ["[t] -> <t,0>", "[t] -> <t,1>"], format!("suffix form {:?}", render(0)))?;
    check(render(1) == ["[t] -> <0,t>", "[t] -> <1,t>"], format!("prefix form {:?}", render(1)))?;
    Ok("suffix <i,0>/<i,1>, prefix <0,i>/<1,i>".into())
}

fn op_counts() -> Outcome {
    let t = Instant::now();
    let table = [
        ("adder_mau", 55),
        ("cuccaro", 46),
        ("sum", 36),
        ("init", 35),
        ("cheung", 21),
        ("pipelined", 75),
        ("cnt", 30),
        ("rd", 28),
    ];
    let mut notes = Vec::new();
    for (name, want) in table {
        let got = compile(name, Some(TransformKind::Base), 0)?.stream.len() as i64;
        let tol = if name == "cheung" { 0 } else { 2 };
        check((got - want).abs() <= tol, format!("{name}: {got} ops, table {want}"))?;
        if got != want {
            notes.push(format!("{name} {got}/{want}"));
        }
    }
    let parity = [compile("parity", None, 0)?.stream.len(), compile("parity", None, 1)?.stream.len()];
    check(parity == [16, 16], format!("parity {parity:?}"))?;
    within(t, Duration::from_secs(5))?;
    Ok(format!(
        "cheung 21 exact, parity 16 exact, off-table: {}",
        if notes.is_empty() { "none".into() } else { notes.join(", ") }
    ))
}

type OpId = (String, Vec<usize>);
/// Reads since the previous writer, then the writer closing the epoch.
type Epoch = (Vec<OpId>, Option<OpId>);

/// Per register entry: the ordered writers and, between consecutive
/// writers, the multiset of pure reads.
fn lane_epochs(s: &GateStream) -> BTreeMap<(Space, usize), Vec<Epoch>> {
    let mut m: BTreeMap<(Space, usize), Vec<Epoch>> = BTreeMap::new();
    for op in &s.ops {
        let id = (op.gate.name.clone(), op.operands.clone());
        for ((sp, mode), &o) in op.gate.spaces.iter().zip(&op.gate.modes).zip(&op.operands) {
            let ep = m.entry((*sp, o)).or_default();
            if ep.last().is_none_or(|e| e.1.is_some()) {
                ep.push((Vec::new(), None));
            }
            let cur = ep.last_mut().unwrap();
            if mode.writes() {
                cur.0.sort();
                cur.1 = Some(id.clone());
            } else {
                cur.0.push(id.clone());
            }
        }
    }
    for ep in m.values_mut() {
        for e in ep.iter_mut() {
            e.0.sort();
        }
    }
    m
}

fn invariance() -> Outcome {
    let t = Instant::now();
    for b in BENCHMARKS {
        let base = compile(b.name, Some(TransformKind::Base), b.directive)?.stream;
        let (ms, lanes) = (base.multiset(), lane_epochs(&base));
        for k in TransformKind::ALL {
            let s = compile(b.name, Some(k), b.directive)?.stream;
            check(s.multiset() == ms, format!("{} {k}: gate multiset differs", b.name))?;
            check(lane_epochs(&s) == lanes, format!("{} {k}: a dependence was reordered", b.name))?;
        }
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("{} benchmarks x 4 transforms, same multiset and per-register order", BENCHMARKS.len()))
}

fn legality() -> Outcome {
    let cat = GateCatalog::standard();
    let opts = ScheduleOptions::default();
    let mut checked = 0;
    for b in BENCHMARKS {
        let p = load(b.source, &cat).map_err(|e| e.to_string())?;
        for k in TransformKind::ALL {
            for n in [2, 4, 6, 8, 12] {
                let c = compile_program(&p, b.directive, Some(k), &b.scaled(n), &opts)
                    .map_err(|e| format!("{} {k} {n}: {e}", b.name))?;
                let rep = check_legality(&c.scop, &c.solution, &c.scop.binding).map_err(|e| e.to_string())?;
                check(
                    rep.violations() == 0,
                    format!("{} {k} at {}: {} violations", b.name, c.scop.binding, rep.violations()),
                )?;
                checked += rep.edges.len();
            }
        }
    }
    Ok(format!("0 violations over {checked} dependence instances"))
}

fn dependence_oracle() -> Outcome {
    let t = Instant::now();
    let cat = GateCatalog::standard();
    let mut total = 0;
    for b in BENCHMARKS {
        let p = load(b.source, &cat).map_err(|e| e.to_string())?;
        let scop = assemble(&p, b.directive);
        let fast = compute_instance_deps(&scop, &scop.binding).map_err(|e| e.to_string())?;
        check(
            common::edge_keys(&fast) == common::brute_deps(&scop, &scop.binding),
            format!("{} differs from the pair scan", b.name),
        )?;
        total += fast.len();
    }
    within(t, Duration::from_secs(30))?;
    Ok(format!("{total} edges identical to the quadratic pair scan"))
}

fn topologies() -> Outcome {
    let t = Instant::now();
    let want = [("grid6x6", 32, 6), ("multiring36", 8, 6), ("tiled36", 24, 2)];
    let mut parts = Vec::new();
    for (name, deg3, cut) in want {
        let g = build_topology(name).map_err(|e| e.to_string())?;
        let p = graph_props(&g, Execution::Parallel);
        check(
            p.vertices == 36 && p.diameter == 10,
            format!("{name}: {} vertices, diameter {}", p.vertices, p.diameter),
        )?;
        check(p.degree3_count == deg3, format!("{name}: {} vertices of degree >= 3", p.degree3_count))?;
        check(p.witness_cut == Some(cut), format!("{name}: witness cut {:?}", p.witness_cut))?;
        check(p.search_cut >= cut, format!("{name}: search found a cut of {}", p.search_cut))?;
        parts.push(format!("{name} deg>=3 {deg3} cut {cut}"));
    }
    within(t, Duration::from_secs(1))?;
    Ok(parts.join(", "))
}

struct MatrixRow {
    bench: &'static str,
    topology: &'static str,
    allocator: Allocator,
    transform: TransformKind,
    ok: bool,
    depth: usize,
    logical_depth: usize,
}

fn mapping_matrix() -> Result<Vec<MatrixRow>, String> {
    let mut streams = Vec::new();
    for name in DEFAULT_SUITE {
        for k in TransformKind::ALL {
            streams.push((*name, k, compile(name, Some(k), 0)?.stream));
        }
    }
    let graphs: Vec<(&'static str, CouplingGraph)> =
        TOPOLOGIES.iter().map(|t| (*t, build_topology(t).unwrap())).collect();
    let mut jobs = Vec::new();
    for (si, _) in streams.iter().enumerate() {
        for gi in 0..graphs.len() {
            for a in Allocator::ALL {
                for seed in 0..10u64 {
                    jobs.push((si, gi, a, seed));
                }
            }
        }
    }
    let rows = par::map(Execution::Parallel, &jobs, |&(si, gi, a, seed)| {
        let (bench, k, s) = &streams[si];
        let (tname, g) = &graphs[gi];
        let logical_depth = stream_depth(s);
        match allocate(s, g, a, seed, &AllocOptions::default()) {
            Ok((pc, m)) => MatrixRow {
                bench,
                topology: tname,
                allocator: a,
                transform: *k,
                ok: verify_mapped(s, &pc, g)
                    && m.added_gates == 3 * m.swaps + 5 * m.reverses
                    && m.size == s.len() + m.added_gates
                    && pc.count(Tag::SwapPart) == 3 * m.swaps,
                depth: m.depth,
                logical_depth,
            },
            Err(_) => {
                MatrixRow { bench, topology: tname, allocator: a, transform: *k, ok: false, depth: 0, logical_depth }
            }
        }
    });
    Ok(rows)
}

fn soundness(rows: &[MatrixRow], t: Instant) -> Outcome {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.ok)
        .take(3)
        .map(|r| format!("{} {} {} {}", r.bench, r.topology, r.allocator.name(), r.transform))
        .collect();
    check(bad.is_empty(), format!("invalid mappings, e.g. {}", bad.join("; ")))?;
    within(t, Duration::from_secs(600))?;
    Ok(format!("{} allocations verified by replay in {:.1?}", rows.len(), t.elapsed()))
}

fn depth_gap(rows: &[MatrixRow]) -> Outcome {
    check(rows.iter().all(|r| r.depth >= r.logical_depth), "a mapped circuit is shallower than its logical circuit")?;
    let mut clusters: HashMap<(&str, &str, Allocator), BTreeMap<TransformKind, Vec<f64>>> = HashMap::new();
    for r in rows {
        clusters
            .entry((r.bench, r.topology, r.allocator))
            .or_default()
            .entry(r.transform)
            .or_default()
            .push(r.depth as f64);
    }
    let mut gaps: Vec<f64> = clusters
        .values()
        .map(|by_t| {
            let means: Vec<f64> = by_t.values().map(|v| v.iter().sum::<f64>() / v.len() as f64).collect();
            let max = means.iter().copied().fold(f64::MIN, f64::max);
            let min = means.iter().copied().fold(f64::MAX, f64::min);
            (max - min) / max
        })
        .collect();
    gaps.sort_by(|a, b| a.total_cmp(b));
    let nonzero = gaps.iter().filter(|g| **g > 0.0).count();
    check(nonzero > 0, "no transform-induced depth gap in any cluster")?;
    let q = |f: f64| 100.0 * gaps[((gaps.len() - 1) as f64 * f).round() as usize];
    Ok(format!(
        "{nonzero}/{} clusters with a nonzero gap; gap % min {:.1} p25 {:.1} median {:.1} p75 {:.1} max {:.1}",
        gaps.len(),
        q(0.0),
        q(0.25),
        q(0.5),
        q(0.75),
        q(1.0)
    ))
}

fn scaling() -> Outcome {
    let t = Instant::now();
    let results = run_matrix(&scaling_suite(1, 0), &MatrixOptions::default());
    let failed: Vec<String> = results
        .iter()
        .filter(|r| r.error.is_some())
        .take(3)
        .map(|r| format!("{} {} {}", r.config.label(), r.config.topology, r.config.allocator.name()))
        .collect();
    check(failed.is_empty(), format!("failed runs: {}", failed.join("; ")))?;
    let mut report = Vec::new();
    for name in ["cheung", "pipelined"] {
        let means: Vec<f64> = SCALING_SIZES
            .iter()
            .map(|n| {
                let d: Vec<f64> = results
                    .iter()
                    .filter(|r| {
                        r.config.benchmark == name
                            && r.config.binding.get("N") == Some(*n)
                            && r.config.allocator == Allocator::Trivial
                    })
                    .filter_map(|r| r.depth_mean)
                    .collect();
                d.iter().sum::<f64>() / d.len() as f64
            })
            .collect();
        let shown: Vec<String> = means.iter().map(|m| format!("{m:.1}")).collect();
        check(
            means.windows(2).all(|w| w[1] >= w[0]),
            format!("{name} trivial mean depth not monotone: {}", shown.join(" ")),
        )?;
        report.push(format!("{name} [{}]", shown.join(" ")));
    }
    within(t, Duration::from_secs(900))?;
    Ok(format!("trivial mean depth by N: {}", report.join(", ")))
}

fn determinism() -> Outcome {
    let suite = default_suite(10, 0);
    let a = to_csv(&run_matrix(&suite, &MatrixOptions::default()), false);
    let b =
        to_csv(&run_matrix(&suite, &MatrixOptions { exec: Execution::Sequential, ..MatrixOptions::default() }), false);
    let lines = a.lines().count() - 1;
    check(lines == 2880, format!("{lines} records"))?;
    check(a == b, "exports differ between runs")?;
    Ok(format!("{lines} records, byte-identical across two runs"))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, title: &str, t: Instant, r: Outcome| {
        let (tag, msg) = match r {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {n:>2} {tag} {title}: {msg} ({:.2?})", t.elapsed());
    };
    let t = Instant::now();
    report(1, "parity golden", t, parity_golden());
    let t = Instant::now();
    report(2, "program assembly", t, assembly_golden());
    let t = Instant::now();
    report(3, "op counts", t, op_counts());
    let t = Instant::now();
    report(4, "transformation invariance", t, invariance());
    let t = Instant::now();
    report(5, "legality", t, legality());
    let t = Instant::now();
    report(6, "dependence oracle", t, dependence_oracle());
    let t = Instant::now();
    report(7, "topologies", t, topologies());
    let t = Instant::now();
    let rows = mapping_matrix();
    match rows {
        Ok(rows) => {
            report(8, "mapping soundness", t, soundness(&rows, t));
            let t = Instant::now();
            report(9, "depth gap", t, depth_gap(&rows));
        }
        Err(e) => {
            report(8, "mapping soundness", t, Err(e.clone()));
            report(9, "depth gap", t, Err(e));
        }
    }
    let t = Instant::now();
    report(10, "scaling", t, scaling());
    let t = Instant::now();
    report(11, "determinism", t, determinism());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
