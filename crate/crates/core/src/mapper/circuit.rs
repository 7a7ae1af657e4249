//! Physical circuits, ASAP depth and the replay check for mapped output.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::topology::CouplingGraph;
use crate::codegen::{CodegenError, GateStream, Op};
use crate::gates::{GateSignature, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tag {
    Original,
    SwapPart,
    ReversePart,
}

/// One elementary op on physical vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhysOp {
    pub gate: Arc<GateSignature>,
    /// Physical vertices for quantum positions, clbits for classical ones.
    pub operands: Vec<usize>,
    pub tag: Tag,
    /// Index of the logical op this implements.
    pub origin: Option<usize>,
}

impl PhysOp {
    fn lanes(&self) -> impl Iterator<Item = (Space, usize)> + '_ {
        self.gate.spaces.iter().copied().zip(self.operands.iter().copied())
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.lanes().filter(|l| l.0 == Space::Quantum).map(|l| l.1).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhysicalCircuit {
    pub vertices: usize,
    pub ops: Vec<PhysOp>,
    /// logical qubit -> vertex; logical qubits past the circuit width are
    /// idle ancillas so the map is a bijection on all vertices.
    pub initial: Vec<usize>,
    pub final_mapping: Vec<usize>,
}

impl PhysicalCircuit {
    pub fn count(&self, tag: Tag) -> usize {
        self.ops.iter().filter(|o| o.tag == tag).count()
    }

    /// Physical circuit as a stream over `q[0..vertices)`.
    pub fn to_stream(&self) -> Result<GateStream, CodegenError> {
        let ops = self.ops.iter().map(|o| Op::new(o.gate.clone(), o.operands.clone())).collect();
        let mut s = GateStream::from_ops(ops)?;
        s.qubit_count = self.vertices;
        Ok(s)
    }
}

/// ASAP leveling over quantum and classical lanes: each op sits one level
/// above the latest op sharing a lane with it.
pub fn depth<I>(lanes: I) -> usize
where
    I: IntoIterator<Item = Vec<(Space, usize)>>,
{
    let mut level: HashMap<(Space, usize), usize> = HashMap::new();
    let mut best = 0;
    for op in lanes {
        let l = 1 + op.iter().map(|k| level.get(k).copied().unwrap_or(0)).max().unwrap_or(0);
        for k in op {
            level.insert(k, l);
        }
        best = best.max(l);
    }
    best
}

pub fn stream_depth(s: &GateStream) -> usize {
    depth(s.ops.iter().map(|o| o.gate.spaces.iter().copied().zip(o.operands.iter().copied()).collect()))
}

pub fn phys_depth(p: &PhysicalCircuit) -> usize {
    depth(p.ops.iter().map(|o| o.lanes().collect()))
}

/// An op after folding reverse groups back into the CNOT they implement.
struct Unit<'a> {
    op: &'a PhysOp,
    operands: Vec<usize>,
    swap_part: bool,
}

fn is_gate(o: &PhysOp, name: &str) -> bool {
    o.gate.name == name
}

fn fold_reverses<'a>(g: &CouplingGraph, ops: &'a [PhysOp]) -> Option<Vec<Unit<'a>>> {
    let mut out = Vec::with_capacity(ops.len());
    let mut i = 0;
    while i < ops.len() {
        let o = &ops[i];
        if o.tag != Tag::ReversePart {
            out.push(Unit { op: o, operands: o.operands.clone(), swap_part: o.tag == Tag::SwapPart });
            i += 1;
            continue;
        }
        let grp = ops.get(i..i + 5)?;
        if grp.iter().any(|x| x.tag != Tag::ReversePart) {
            return None;
        }
        let (a, b) = (grp[0].operands[0], grp[1].operands[0]);
        let hs = [0, 1, 3, 4].iter().all(|&k| is_gate(&grp[k], "H"));
        let mid = &grp[2];
        if !hs
            || grp[3].operands[0] != a
            || grp[4].operands[0] != b
            || !is_gate(mid, "CNOT")
            || mid.operands != [b, a]
            || !g.adjacent(a, b)
            || !g.oriented(b, a)
        {
            return None;
        }
        out.push(Unit { op: mid, operands: vec![a, b], swap_part: mid.origin.is_none() });
        i += 5;
    }
    Some(out)
}

fn feasible(g: &CouplingGraph, sig: &GateSignature, qubits: &[usize]) -> bool {
    let adjacent = match qubits.len() {
        0 | 1 => true,
        2 => g.adjacent(qubits[0], qubits[1]),
        _ => {
            let t = *qubits.last().unwrap();
            qubits[..qubits.len() - 1].iter().all(|&c| g.adjacent(c, t))
        }
    };
    adjacent && (sig.name != "CNOT" || qubits.len() != 2 || g.oriented(qubits[0], qubits[1]))
}

/// Replay `phys` against `logical`: swap groups must be three CNOTs on one
/// edge, every logical op must appear once on the current images of its
/// operands after all its lane predecessors, every multi-qubit op must be
/// adjacency-feasible, and the final mapping must match.
pub fn verify_mapped(logical: &GateStream, phys: &PhysicalCircuit, g: &CouplingGraph) -> bool {
    let n = phys.vertices;
    if n != g.n || phys.initial.len() != n || logical.qubit_count > n {
        return false;
    }
    let mut l2p = phys.initial.clone();
    let mut p2l = vec![usize::MAX; n];
    for (l, &p) in l2p.iter().enumerate() {
        if p >= n || p2l[p] != usize::MAX {
            return false;
        }
        p2l[p] = l;
    }
    // predecessor lists on shared lanes
    let mut last: HashMap<(Space, usize), usize> = HashMap::new();
    let mut preds: Vec<Vec<usize>> = Vec::with_capacity(logical.ops.len());
    for (k, op) in logical.ops.iter().enumerate() {
        let lanes: Vec<(Space, usize)> = op.gate.spaces.iter().copied().zip(op.operands.iter().copied()).collect();
        preds.push(lanes.iter().filter_map(|l| last.get(l).copied()).collect());
        for l in lanes {
            last.insert(l, k);
        }
    }
    let Some(units) = fold_reverses(g, &phys.ops) else { return false };
    let mut done = vec![false; logical.ops.len()];
    let mut i = 0;
    while i < units.len() {
        let u = &units[i];
        if u.swap_part {
            let Some(grp) = units.get(i..i + 3) else { return false };
            let (a, b) = (u.operands[0], u.operands[1]);
            let ok = grp.iter().all(|x| x.swap_part && is_gate(x.op, "CNOT"))
                && grp[1].operands == [b, a]
                && grp[2].operands == [a, b]
                && g.adjacent(a, b);
            if !ok {
                return false;
            }
            let (la, lb) = (p2l[a], p2l[b]);
            l2p.swap(la, lb);
            p2l.swap(a, b);
            i += 3;
            continue;
        }
        let Some(k) = u.op.origin else { return false };
        let Some(lop) = logical.ops.get(k) else { return false };
        if done[k] || preds[k].iter().any(|&p| !done[p]) || lop.gate.name != u.op.gate.name {
            return false;
        }
        let mut want = Vec::with_capacity(lop.operands.len());
        for (sp, &o) in lop.gate.spaces.iter().zip(&lop.operands) {
            want.push(if *sp == Space::Quantum { l2p[o] } else { o });
        }
        if want != u.operands {
            return false;
        }
        let qs: Vec<usize> =
            u.operands.iter().zip(&lop.gate.spaces).filter(|(_, s)| **s == Space::Quantum).map(|(o, _)| *o).collect();
        // reversed CNOTs were checked against the edge orientation when folded
        let sig_ok = if u.op.tag == Tag::ReversePart {
            qs.len() == 2 && g.adjacent(qs[0], qs[1])
        } else {
            feasible(g, &lop.gate, &qs)
        };
        if !sig_ok {
            return false;
        }
        done[k] = true;
        i += 1;
    }
    done.iter().all(|d| *d) && l2p == phys.final_mapping
}
