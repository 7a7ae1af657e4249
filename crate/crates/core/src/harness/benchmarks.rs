//! Bundled AXL benchmark sources.

use crate::affine::Binding;

#[derive(Clone, Copy, Debug)]
pub struct Benchmark {
    pub name: &'static str,
    pub source: &'static str,
    /// Directive compiled by default.
    pub directive: usize,
    /// Parameter swept by the scaling suite.
    pub scale_param: &'static str,
}

pub const BENCHMARKS: &[Benchmark] = &[
    Benchmark { name: "parity", source: include_str!("../../benchmarks/parity.axl"), directive: 0, scale_param: "M" },
    Benchmark {
        name: "adder_mau",
        source: include_str!("../../benchmarks/adder_mau.axl"),
        directive: 0,
        scale_param: "N",
    },
    Benchmark { name: "cuccaro", source: include_str!("../../benchmarks/cuccaro.axl"), directive: 0, scale_param: "N" },
    Benchmark { name: "sum", source: include_str!("../../benchmarks/sum.axl"), directive: 0, scale_param: "N" },
    Benchmark { name: "init", source: include_str!("../../benchmarks/init.axl"), directive: 0, scale_param: "N" },
    Benchmark { name: "cheung", source: include_str!("../../benchmarks/cheung.axl"), directive: 0, scale_param: "N" },
    Benchmark {
        name: "pipelined",
        source: include_str!("../../benchmarks/pipelined.axl"),
        directive: 0,
        scale_param: "N",
    },
    Benchmark { name: "cnt", source: include_str!("../../benchmarks/cnt.axl"), directive: 0, scale_param: "N" },
    Benchmark { name: "rd", source: include_str!("../../benchmarks/rd.axl"), directive: 0, scale_param: "N" },
];

/// The eight circuits of the default evaluation suite (parity is a demo).
pub const DEFAULT_SUITE: &[&str] = &["adder_mau", "cuccaro", "sum", "init", "cheung", "pipelined", "cnt", "rd"];

pub fn benchmark(name: &str) -> Option<&'static Benchmark> {
    BENCHMARKS.iter().find(|b| b.name == name)
}

impl Benchmark {
    /// Binding that scales the benchmark to `value`.
    pub fn scaled(&self, value: i64) -> Binding {
        Binding::new().with(self.scale_param, value)
    }
}
