//! Affine schedule transformations: the assembly schedule (`base`), Pluto
//! style minimum/maximum fusion and Feautrier's greedy scheduler, plus an
//! exact instance-level legality check.
//!
//! Rows are restricted to `±i + c` (one iterator, unit coefficient) or a
//! constant. Offsets are found exactly as the least solution of difference
//! constraints over the enumerated dependence instances.

mod feautrier;
mod legality;
mod pluto;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{AffineError, AffineExpr, AffineMap, Binding};
use crate::par::Execution;
use crate::scop::Scop;

pub use legality::{check_legality, EdgeStatus, LegalityReport};
pub use search::validation_bindings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Base,
    Feautrier,
    #[serde(rename = "plutomin")]
    PlutoMin,
    #[serde(rename = "plutomax")]
    PlutoMax,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] =
        [TransformKind::Base, TransformKind::Feautrier, TransformKind::PlutoMin, TransformKind::PlutoMax];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Base => "base",
            TransformKind::Feautrier => "feautrier",
            TransformKind::PlutoMin => "plutomin",
            TransformKind::PlutoMax => "plutomax",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One schedule dimension of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Row {
    Const(i64),
    Lin { iter: usize, sign: i64, offset: i64 },
}

impl Row {
    pub fn eval(&self, point: &[i64]) -> i64 {
        match *self {
            Row::Const(c) => c,
            Row::Lin { iter, sign, offset } => sign * point[iter] + offset,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Row::Const(_))
    }

    pub fn to_expr(&self) -> AffineExpr {
        match *self {
            Row::Const(c) => AffineExpr::constant(c),
            Row::Lin { iter, sign, offset } => AffineExpr::iter(iter).scale(sign).add_const(offset),
        }
    }

    /// Read a row back from an affine expression of the restricted form.
    pub fn from_expr(e: &AffineExpr) -> Option<Row> {
        if !e.params.is_empty() {
            return None;
        }
        let nz: Vec<(usize, i64)> = e.coeffs.iter().copied().enumerate().filter(|(_, c)| *c != 0).collect();
        match nz.as_slice() {
            [] => Some(Row::Const(e.constant)),
            [(k, s)] if s.abs() == 1 => Some(Row::Lin { iter: *k, sign: *s, offset: e.constant }),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DimKind {
    /// At least one node has an iterator row.
    Linear,
    /// Every node has a constant row.
    Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleSolution {
    pub transform: TransformKind,
    /// `rows[node][dim]`; every node has the same number of dimensions.
    pub rows: Vec<Vec<Row>>,
}

impl ScheduleSolution {
    pub fn dims(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn dim_kind(&self, d: usize) -> DimKind {
        if self.rows.iter().any(|r| !r[d].is_const()) {
            DimKind::Linear
        } else {
            DimKind::Scalar
        }
    }

    pub fn linear_dims(&self) -> usize {
        (0..self.dims()).filter(|&d| self.dim_kind(d) == DimKind::Linear).count()
    }

    pub fn scalar_dims(&self) -> usize {
        self.dims() - self.linear_dims()
    }

    pub fn timestamp(&self, node: usize, point: &[i64]) -> Vec<i64> {
        self.rows[node].iter().map(|r| r.eval(point)).collect()
    }

    pub fn maps(&self, scop: &Scop) -> Vec<AffineMap> {
        self.rows
            .iter()
            .zip(&scop.nodes)
            .map(|(r, n)| AffineMap::new(n.domain.iterators.clone(), r.iter().map(Row::to_expr).collect()))
            .collect()
    }

    /// Per-node schedules, one line each.
    pub fn describe(&self, scop: &Scop) -> String {
        let mut s = format!("transform {}\n", self.transform);
        for (n, m) in scop.nodes.iter().zip(self.maps(scop)) {
            s.push_str(&format!("{}: {}\n", n.label(), m));
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error("assembly schedule of `{0}` is not of the form ±i+c")]
    UnsupportedSchedule(String),
    #[error("no legal schedule found at dimension {dim}")]
    NoLegalSchedule { dim: usize },
    #[error("scheduler produced an illegal schedule at {binding}")]
    Illegal { binding: String },
}

#[derive(Clone, Debug)]
pub struct ScheduleOptions {
    pub exec: Execution,
    /// Value given to every parameter for the canonical validation binding.
    pub validation_value: i64,
    /// Exhaustive candidate enumeration up to this many combinations;
    /// coordinate descent beyond.
    pub exhaustive_limit: usize,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        Self { exec: Execution::Parallel, validation_value: 8, exhaustive_limit: 1 << 16 }
    }
}

pub fn schedule_base(scop: &Scop) -> Result<ScheduleSolution, TransformError> {
    let rows = scop
        .nodes
        .iter()
        .map(|n| {
            n.schedule
                .outputs
                .iter()
                .map(|e| Row::from_expr(e).ok_or_else(|| TransformError::UnsupportedSchedule(n.label())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScheduleSolution { transform: TransformKind::Base, rows })
}

pub fn schedule_pluto(
    scop: &Scop,
    max_fusion: bool,
    opts: &ScheduleOptions,
) -> Result<ScheduleSolution, TransformError> {
    pluto::schedule(scop, max_fusion, opts)
}

pub fn schedule_feautrier(scop: &Scop, opts: &ScheduleOptions) -> Result<ScheduleSolution, TransformError> {
    feautrier::schedule(scop, opts)
}

/// Run `kind` on `scop` and confirm legality at the scop's own binding.
pub fn schedule(scop: &Scop, kind: TransformKind, opts: &ScheduleOptions) -> Result<ScheduleSolution, TransformError> {
    let sol = match kind {
        TransformKind::Base => schedule_base(scop)?,
        TransformKind::Feautrier => schedule_feautrier(scop, opts)?,
        TransformKind::PlutoMin => schedule_pluto(scop, false, opts)?,
        TransformKind::PlutoMax => schedule_pluto(scop, true, opts)?,
    };
    let report = check_legality(scop, &sol, &scop.binding)?;
    if !report.overall {
        return Err(TransformError::Illegal { binding: scop.binding.to_string() });
    }
    Ok(sol)
}

/// Same as [`schedule`] with the binding replaced.
pub fn schedule_at(
    scop: &Scop,
    binding: &Binding,
    kind: TransformKind,
    opts: &ScheduleOptions,
) -> Result<ScheduleSolution, TransformError> {
    schedule(&scop.rebind(binding.clone()), kind, opts)
}
