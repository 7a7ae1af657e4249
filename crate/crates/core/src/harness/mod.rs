//! Benchmark harness: the run matrix, summaries and exports.

pub mod benchmarks;
mod report;
mod run;

pub use benchmarks::{benchmark, Benchmark, BENCHMARKS, DEFAULT_SUITE};
pub use report::{
    export, geomean, records, summarize, summary_text, to_csv, to_json, Format, GapRow, SummaryRow, SummaryTable,
    CSV_COLUMNS,
};
pub use run::{
    compile_benchmark, default_suite, mean_std, run_matrix, scaling_suite, MatrixOptions, Record, RunConfig, RunResult,
    Status, SCALING_SIZES,
};
