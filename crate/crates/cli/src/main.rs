use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use paqc::axl::load;
use paqc::codegen::{emit_qasm, parse_qasm};
use paqc::harness::{
    benchmark, default_suite, export, run_matrix, scaling_suite, summarize, summary_text, Format, MatrixOptions,
};
use paqc::mapper::{allocate, build_topology, graph_props, AllocOptions, Allocator, CouplingGraph};
use paqc::transform::ScheduleOptions;
use paqc::{compile_program, Binding, Execution, GateCatalog, TransformKind};

#[derive(Parser)]
#[command(name = "paqc", version, about = "Compile, map and benchmark affine quantum circuits")]
struct Cli {
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Loops,
    Qasm,
    Schedule,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Default,
    Scaling,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile an AXL file (or a bundled benchmark) to loops or OpenQASM.
    Compile {
        /// AXL source file.
        file: Option<PathBuf>,
        /// Bundled benchmark instead of a file.
        #[arg(long, conflicts_with = "file")]
        bench: Option<String>,
        /// Codegen directive index.
        #[arg(long)]
        directive: Option<usize>,
        /// base, plutomin, plutomax or feautrier; defaults to the directive's.
        #[arg(long)]
        transform: Option<String>,
        /// Parameter override, e.g. `-D N=8`.
        #[arg(short = 'D', value_name = "NAME=VALUE")]
        define: Vec<String>,
        #[arg(long, value_enum, default_value = "loops")]
        emit: Emit,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Map an OpenQASM circuit onto a coupling graph.
    Map {
        file: PathBuf,
        /// Bundled topology name.
        #[arg(long, default_value = "grid6x6")]
        topology: String,
        /// Coupling graph as JSON; overrides --topology.
        #[arg(long)]
        topology_file: Option<PathBuf>,
        /// trivial, wpm_lite or sabre_lite.
        #[arg(long, default_value = "trivial")]
        allocator: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only allow CNOTs from the lower to the higher vertex of an edge.
        #[arg(long)]
        directed: bool,
        /// Write the mapped circuit here; metrics go to stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment matrix and export per-allocation records.
    Bench {
        #[arg(long, value_enum, default_value = "default")]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Record allocation wall times (exports are then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print structural properties of a bundled topology as JSON.
    TopoProps { name: String },
}

fn exec(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_define(s: &str) -> Result<(String, i64)> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected NAME=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().parse().with_context(|| format!("bad value in `{s}`"))?))
}

fn topology(name: &str, file: Option<&Path>) -> Result<CouplingGraph> {
    match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
            Ok(CouplingGraph::from_json(stem, &text)?)
        }
        None => Ok(build_topology(name)?),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let exec = exec(cli);
    match &cli.cmd {
        Cmd::Compile { file, bench, directive, transform, define, emit, out } => {
            let (source, default_directive) = match (file, bench) {
                (Some(f), _) => (std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?, 0),
                (None, Some(b)) => {
                    let b = benchmark(b).ok_or_else(|| anyhow!("unknown benchmark `{b}`"))?;
                    (b.source.to_string(), b.directive)
                }
                (None, None) => bail!("give an AXL file or --bench NAME"),
            };
            let kind = match transform {
                Some(t) => Some(TransformKind::from_name(t).ok_or_else(|| anyhow!("unknown transform `{t}`"))?),
                None => None,
            };
            let mut binding = Binding::new();
            for d in define {
                let (k, v) = parse_define(d)?;
                binding.set(&k, v);
            }
            let program = load(&source, &GateCatalog::standard())?;
            let opts = ScheduleOptions { exec, ..ScheduleOptions::default() };
            let c = compile_program(&program, directive.unwrap_or(default_directive), kind, &binding, &opts)?;
            let text = match emit {
                Emit::Loops => c.loops(),
                Emit::Qasm => c.qasm()?,
                Emit::Schedule => c.solution.describe(&c.scop),
            };
            write_out(out.as_deref(), &text)
        }
        Cmd::Map { file, topology: name, topology_file, allocator, seed, directed, out } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let stream = parse_qasm(&text, &GateCatalog::standard())?;
            let g = topology(name, topology_file.as_deref())?.directed(*directed);
            let a = Allocator::from_name(allocator).ok_or_else(|| anyhow!("unknown allocator `{allocator}`"))?;
            let (pc, m) = allocate(&stream, &g, a, *seed, &AllocOptions::default())?;
            if let Some(p) = out {
                write_out(Some(p), &emit_qasm(&pc.to_stream()?)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&m)?);
            Ok(())
        }
        Cmd::Bench { suite, reps, seed, out, format, timing } => {
            let fmt = Format::from_name(format).ok_or_else(|| anyhow!("unknown format `{format}`"))?;
            let configs = match suite {
                Suite::Default => default_suite(*reps, *seed),
                Suite::Scaling => scaling_suite(*reps, *seed),
            };
            let opts = MatrixOptions { exec, timing: *timing, ..MatrixOptions::default() };
            let results = run_matrix(&configs, &opts);
            export(&results, fmt, *timing, out).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", summary_text(&summarize(&results)));
            let failed = results.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} configs had failures", results.len());
            }
            Ok(())
        }
        Cmd::TopoProps { name } => {
            let g = build_topology(name)?;
            println!("{}", serde_json::to_string_pretty(&graph_props(&g, exec))?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
