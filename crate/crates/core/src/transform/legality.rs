use serde::Serialize;

use super::ScheduleSolution;
use crate::affine::{AffineError, Binding};
use crate::deps::{compute_instance_deps, DependenceEdge};
use crate::scop::Scop;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeStatus {
    /// First dimension where the sink is strictly later.
    Strong(usize),
    /// Equal timestamps: the edge is never ordered.
    Weak,
    /// The sink comes first at this dimension.
    Violated(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct LegalityReport {
    pub edges: Vec<(DependenceEdge, EdgeStatus)>,
    pub overall: bool,
}

impl LegalityReport {
    pub fn violations(&self) -> usize {
        self.edges.iter().filter(|e| !matches!(e.1, EdgeStatus::Strong(_))).count()
    }
}

pub fn edge_status(a: &[i64], b: &[i64]) -> EdgeStatus {
    for (d, (x, y)) in a.iter().zip(b).enumerate() {
        if y > x {
            return EdgeStatus::Strong(d);
        }
        if y < x {
            return EdgeStatus::Violated(d);
        }
    }
    EdgeStatus::Weak
}

/// Exact check: every dependence instance at `binding` must be ordered
/// source-before-sink by the transformed timestamps.
pub fn check_legality(scop: &Scop, sol: &ScheduleSolution, binding: &Binding) -> Result<LegalityReport, AffineError> {
    let deps = compute_instance_deps(scop, binding)?;
    let mut overall = true;
    let edges = deps
        .into_iter()
        .map(|e| {
            let a = sol.timestamp(e.source.node, &e.source.point);
            let b = sol.timestamp(e.sink.node, &e.sink.point);
            let st = edge_status(&a, &b);
            overall &= matches!(st, EdgeStatus::Strong(_));
            (e, st)
        })
        .collect();
    Ok(LegalityReport { edges, overall })
}
