//! Polyhedral scanning of a scheduled scop into a loop tree.
//!
//! Loop variable `c{d}` is schedule dimension `d`. Because every searched
//! row has the form `±i + c`, each node iterator is recovered exactly from
//! one loop variable and loop bounds follow from the node's domain by
//! Fourier-Motzkin elimination of the inner loop variables.

use std::collections::BTreeMap;

use serde::Serialize;

use super::CodegenError;
use crate::affine::{ceil_div, floor_div, fm_eliminate, AffineExpr, Binding, Constraint};
use crate::scop::Scop;
use crate::transform::{Row, ScheduleSolution};

/// Lower bounds round up, upper bounds round down.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Bound {
    Term { expr: AffineExpr, div: i64 },
    Max(Vec<Bound>),
    Min(Vec<Bound>),
}

impl Bound {
    pub fn constant(c: i64) -> Self {
        Bound::Term { expr: AffineExpr::constant(c), div: 1 }
    }

    pub fn eval(&self, env: &[i64], binding: &Binding, lower: bool) -> Result<i64, CodegenError> {
        Ok(match self {
            Bound::Term { expr, div } => {
                let v = expr.eval(env, binding)?;
                if lower {
                    ceil_div(v, *div)
                } else {
                    floor_div(v, *div)
                }
            }
            Bound::Max(items) => {
                let mut m = i64::MIN;
                for b in items {
                    m = m.max(b.eval(env, binding, lower)?);
                }
                m
            }
            Bound::Min(items) => {
                let mut m = i64::MAX;
                for b in items {
                    m = m.min(b.eval(env, binding, lower)?);
                }
                m
            }
        })
    }

    fn max_of(mut items: Vec<Bound>) -> Bound {
        items.dedup();
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Bound::Max(items)
        }
    }

    fn min_of(mut items: Vec<Bound>) -> Bound {
        items.dedup();
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Bound::Min(items)
        }
    }

    /// Single exact affine value, if the bound is one.
    pub fn as_affine(&self) -> Option<&AffineExpr> {
        match self {
            Bound::Term { expr, div: 1 } => Some(expr),
            _ => None,
        }
    }
}

/// `lower <= c{dim} <= upper`, checked at a leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Guard {
    pub dim: usize,
    pub lower: Bound,
    pub upper: Bound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AstNode {
    Loop {
        dim: usize,
        lower: Bound,
        upper: Bound,
        body: Vec<AstNode>,
    },
    /// A loop with a single iteration; `c{dim}` is simply bound.
    Bind {
        dim: usize,
        value: AffineExpr,
        body: Vec<AstNode>,
    },
    Leaf(Leaf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Leaf {
    pub node: usize,
    pub listing: String,
    /// Node iterators as functions of the loop variables.
    pub point: Vec<AffineExpr>,
    /// Gate operands as functions of the loop variables.
    pub args: Vec<AffineExpr>,
    pub guards: Vec<Guard>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopAst {
    pub dims: usize,
    pub roots: Vec<AstNode>,
}

impl LoopAst {
    pub fn leaves(&self) -> Vec<&Leaf> {
        fn walk<'a>(n: &'a AstNode, out: &mut Vec<&'a Leaf>) {
            match n {
                AstNode::Loop { body, .. } | AstNode::Bind { body, .. } => body.iter().for_each(|b| walk(b, out)),
                AstNode::Leaf(l) => out.push(l),
            }
        }
        let mut out = Vec::new();
        self.roots.iter().for_each(|r| walk(r, &mut out));
        out
    }
}

struct NodeInfo {
    point: Vec<AffineExpr>,
    /// `bounds[d]` for every dimension where the node has an iterator row.
    bounds: BTreeMap<usize, (Bound, Bound)>,
}

fn node_info(scop: &Scop, sol: &ScheduleSolution, n: usize) -> Result<NodeInfo, CodegenError> {
    let node = &scop.nodes[n];
    let dims = sol.dims();
    let mut point: Vec<Option<AffineExpr>> = vec![None; node.dim()];
    let mut lin_dims = Vec::new();
    for (d, r) in sol.rows[n].iter().enumerate() {
        if let Row::Lin { iter, sign, offset } = *r {
            if point[iter].is_none() {
                point[iter] = Some(AffineExpr::iter(d).add_const(-offset).scale(sign));
            }
            lin_dims.push(d);
        }
    }
    let point: Vec<AffineExpr> = point
        .into_iter()
        .map(|p| p.ok_or_else(|| CodegenError::NotInvertible(node.label())))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<AffineExpr> = node.domain.rows().iter().map(|r| r.compose(&point)).collect();
    // Repeated use of one iterator ties the loop variables together.
    for (d, r) in sol.rows[n].iter().enumerate() {
        if let Row::Lin { iter, sign, offset } = *r {
            let here = AffineExpr::iter(d).add_const(-offset).scale(sign);
            let diff = here.sub(&point[iter]);
            if !diff.is_constant() || diff.constant != 0 {
                rows.extend(Constraint::eq(diff).rows());
            }
        }
    }
    // Project level by level, innermost first.
    let mut bounds = BTreeMap::new();
    let mut cur = crate::affine::dedup_rows(rows);
    for d in (0..dims).rev() {
        if lin_dims.contains(&d) {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for r in &cur {
                let a = r.coeff(d);
                if a == 0 {
                    continue;
                }
                let mut rest = r.clone();
                rest.set_coeff(d, 0);
                let rest = rest.normalized();
                if a > 0 {
                    lo.push(Bound::Term { expr: rest.scale(-1), div: a });
                } else {
                    hi.push(Bound::Term { expr: rest, div: -a });
                }
            }
            if lo.is_empty() || hi.is_empty() {
                return Err(CodegenError::Unbounded(node.label()));
            }
            lo.sort_by_key(|b| format!("{b:?}"));
            hi.sort_by_key(|b| format!("{b:?}"));
            bounds.insert(d, (Bound::max_of(lo), Bound::min_of(hi)));
        }
        cur = fm_eliminate(&cur, d);
    }
    Ok(NodeInfo { point, bounds })
}

/// Build the loop tree for `sol`.
pub fn scan(scop: &Scop, sol: &ScheduleSolution) -> Result<LoopAst, CodegenError> {
    let infos = (0..scop.nodes.len()).map(|n| node_info(scop, sol, n)).collect::<Result<Vec<_>, _>>()?;
    let all: Vec<usize> = (0..scop.nodes.len()).collect();
    let mut guards: Vec<Vec<Guard>> = vec![Vec::new(); scop.nodes.len()];
    let roots = scan_level(scop, sol, &infos, &all, 0, &mut guards);
    Ok(LoopAst { dims: sol.dims(), roots })
}

fn scan_level(
    scop: &Scop,
    sol: &ScheduleSolution,
    infos: &[NodeInfo],
    group: &[usize],
    d: usize,
    guards: &mut Vec<Vec<Guard>>,
) -> Vec<AstNode> {
    if d == sol.dims() {
        return group
            .iter()
            .map(|&n| {
                let node = &scop.nodes[n];
                let point = infos[n].point.clone();
                AstNode::Leaf(Leaf {
                    node: n,
                    listing: node.gate.listing.clone(),
                    args: node.args.iter().map(|a| a.compose(&point)).collect(),
                    point,
                    guards: guards[n].clone(),
                })
            })
            .collect();
    }
    if group.iter().all(|&n| sol.rows[n][d].is_const()) {
        let mut by_value: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for &n in group {
            if let Row::Const(c) = sol.rows[n][d] {
                by_value.entry(c).or_default().push(n);
            }
        }
        return by_value.values().flat_map(|g| scan_level(scop, sol, infos, g, d + 1, guards)).collect();
    }
    let per_node: Vec<(Bound, Bound)> = group
        .iter()
        .map(|&n| match sol.rows[n][d] {
            Row::Const(c) => (Bound::constant(c), Bound::constant(c)),
            Row::Lin { .. } => infos[n].bounds[&d].clone(),
        })
        .collect();
    let lower = Bound::min_of(dedup_keep_order(per_node.iter().map(|b| b.0.clone()).collect()));
    let upper = Bound::max_of(dedup_keep_order(per_node.iter().map(|b| b.1.clone()).collect()));
    let mut pushed = Vec::new();
    for (&n, (lo, hi)) in group.iter().zip(&per_node) {
        if *lo != lower || *hi != upper {
            guards[n].push(Guard { dim: d, lower: lo.clone(), upper: hi.clone() });
            pushed.push(n);
        }
    }
    let body = scan_level(scop, sol, infos, group, d + 1, guards);
    for n in pushed {
        guards[n].pop();
    }
    let node = match (lower.as_affine(), upper.as_affine()) {
        (Some(a), Some(b)) if a == b => AstNode::Bind { dim: d, value: a.clone(), body },
        _ => AstNode::Loop { dim: d, lower, upper, body },
    };
    vec![node]
}

fn dedup_keep_order(items: Vec<Bound>) -> Vec<Bound> {
    let mut out: Vec<Bound> = Vec::new();
    for b in items {
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}
