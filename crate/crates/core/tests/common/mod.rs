//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use paqc::affine::{lex_cmp, Binding};
use paqc::codegen::GateStream;
use paqc::deps::{DepKind, DependenceEdge};
use paqc::gates::Space;
use paqc::scop::Scop;

/// Points of a node domain found by scanning a box and testing membership.
pub fn box_points(scop: &Scop, node: usize, binding: &Binding, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let d = scop.nodes[node].dim();
    let mut out = Vec::new();
    let mut p = vec![lo; d];
    loop {
        if scop.nodes[node].domain.contains(&p, binding).unwrap() {
            out.push(p.clone());
        }
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if p[k] < hi {
                p[k] += 1;
                for q in p.iter_mut().skip(k + 1) {
                    *q = lo;
                }
                break;
            }
        }
    }
}

pub fn box_bound(binding: &Binding) -> i64 {
    3 * binding.0.values().copied().max().unwrap_or(0) + 8
}

/// Every access as (node, point, arg, space, index, writes, timestamp).
pub type Access = (usize, Vec<i64>, usize, Space, i64, bool, Vec<i64>);

pub fn brute_accesses(scop: &Scop, binding: &Binding) -> Vec<Access> {
    let b = box_bound(binding);
    let mut out = Vec::new();
    for (n, node) in scop.nodes.iter().enumerate() {
        for p in box_points(scop, n, binding, -b, b) {
            let ts = node.schedule.apply(&p, binding).unwrap();
            for (k, arg) in node.args.iter().enumerate() {
                let idx = arg.eval(&p, binding).unwrap();
                out.push((n, p.clone(), k, node.gate.spaces[k], idx, node.gate.modes[k].writes(), ts.clone()));
            }
        }
    }
    out
}

pub type EdgeKey = (usize, Vec<i64>, usize, Vec<i64>, DepKind, Space, i64);

/// Quadratic pair scan: an ordered pair on one register entry is a direct
/// dependence when at least one side writes and no write lies strictly
/// between them.
pub fn brute_deps(scop: &Scop, binding: &Binding) -> BTreeSet<EdgeKey> {
    let acc = brute_accesses(scop, binding);
    let before = |a: &Access, b: &Access| lex_cmp(&a.6, &b.6).is_lt();
    let mut out = BTreeSet::new();
    for x in &acc {
        for y in &acc {
            if x.3 != y.3 || x.4 != y.4 || !before(x, y) || !(x.5 || y.5) {
                continue;
            }
            let blocked = acc.iter().any(|z| z.3 == x.3 && z.4 == x.4 && z.5 && before(x, z) && before(z, y));
            if blocked {
                continue;
            }
            let kind = match (x.5, y.5) {
                (true, true) => DepKind::Output,
                (true, false) => DepKind::Flow,
                _ => DepKind::Anti,
            };
            out.insert((x.0, x.1.clone(), y.0, y.1.clone(), kind, x.3, x.4));
        }
    }
    out
}

pub fn edge_keys(edges: &[DependenceEdge]) -> BTreeSet<EdgeKey> {
    edges
        .iter()
        .map(|e| {
            (
                e.source.node,
                e.source.point.clone(),
                e.sink.node,
                e.sink.point.clone(),
                e.kind,
                e.source.space,
                e.source.index,
            )
        })
        .collect()
}

/// Gate instances in original program order, from box enumeration.
pub fn brute_stream_multiset(scop: &Scop, binding: &Binding) -> Vec<(String, Vec<usize>)> {
    let b = box_bound(binding);
    let mut inst: Vec<(Vec<i64>, String, Vec<usize>)> = Vec::new();
    for (n, node) in scop.nodes.iter().enumerate() {
        for p in box_points(scop, n, binding, -b, b) {
            let ts = node.schedule.apply(&p, binding).unwrap();
            let args = node.args.iter().map(|a| a.eval(&p, binding).unwrap() as usize).collect();
            inst.push((ts, node.gate.name.clone(), args));
        }
    }
    let mut v: Vec<(String, Vec<usize>)> = inst.into_iter().map(|x| (x.1, x.2)).collect();
    v.sort();
    v
}

/// Longest path (in ops) through the lane-sharing dependence DAG.
pub fn dag_depth(s: &GateStream) -> usize {
    let n = s.ops.len();
    let lanes: Vec<Vec<(Space, usize)>> =
        s.ops.iter().map(|o| o.gate.spaces.iter().copied().zip(o.operands.iter().copied()).collect()).collect();
    let mut longest = vec![1usize; n];
    for j in 0..n {
        for i in 0..j {
            if lanes[i].iter().any(|l| lanes[j].contains(l)) {
                longest[j] = longest[j].max(longest[i] + 1);
            }
        }
    }
    longest.into_iter().max().unwrap_or(0)
}

/// Sorted edge-pair index used to compare two edge sets cheaply.
pub fn count_by_kind(edges: &BTreeSet<EdgeKey>) -> HashMap<DepKind, usize> {
    let mut m = HashMap::new();
    for e in edges {
        *m.entry(e.4).or_insert(0) += 1;
    }
    m
}
