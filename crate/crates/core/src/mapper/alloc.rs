//! Qubit allocators: initial placement plus SWAP insertion.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::circuit::{phys_depth, stream_depth, PhysOp, PhysicalCircuit, Tag};
use super::topology::CouplingGraph;
use super::MapError;
use crate::codegen::{GateStream, Op};
use crate::gates::{GateCatalog, GateSignature, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Allocator {
    Trivial,
    WpmLite,
    SabreLite,
}

impl Allocator {
    pub const ALL: [Allocator; 3] = [Allocator::Trivial, Allocator::WpmLite, Allocator::SabreLite];

    pub fn name(self) -> &'static str {
        match self {
            Allocator::Trivial => "trivial",
            Allocator::WpmLite => "wpm_lite",
            Allocator::SabreLite => "sabre_lite",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    /// Whether the output depends on the seed.
    pub fn randomized(self) -> bool {
        self == Allocator::SabreLite
    }
}

/// Front-layer cost weight of the look-ahead window.
pub const LOOKAHEAD_WEIGHT: f64 = 0.5;
pub const LOOKAHEAD_OPS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AllocOptions {
    pub timeout: Option<Duration>,
}

impl Default for AllocOptions {
    fn default() -> Self {
        Self { timeout: Some(Duration::from_secs(60)) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub depth: usize,
    pub size: usize,
    pub added_gates: usize,
    pub swaps: usize,
    pub reverses: usize,
    /// Wall-clock seconds spent in the allocate call.
    pub alloc_time: f64,
}

struct Router<'g> {
    g: &'g CouplingGraph,
    cx: Arc<GateSignature>,
    h: Arc<GateSignature>,
    ops: Vec<PhysOp>,
    l2p: Vec<usize>,
    p2l: Vec<usize>,
    swaps: usize,
    reverses: usize,
    deadline: Option<Instant>,
}

impl<'g> Router<'g> {
    fn new(g: &'g CouplingGraph, initial: Vec<usize>, deadline: Option<Instant>) -> Self {
        let cat = GateCatalog::standard();
        let sig = |n: &str| Arc::new(cat.signature(n).expect("standard gate").clone());
        let mut p2l = vec![0; g.n];
        for (l, &p) in initial.iter().enumerate() {
            p2l[p] = l;
        }
        Self { g, cx: sig("CNOT"), h: sig("H"), ops: Vec::new(), l2p: initial, p2l, swaps: 0, reverses: 0, deadline }
    }

    fn check_time(&self) -> Result<(), MapError> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(MapError::Timeout),
            _ => Ok(()),
        }
    }

    fn push(&mut self, gate: Arc<GateSignature>, operands: Vec<usize>, tag: Tag, origin: Option<usize>) {
        self.ops.push(PhysOp { gate, operands, tag, origin });
    }

    /// CNOT with control `a`, target `b`; wrapped in Hadamards when the edge
    /// only supports the other orientation.
    fn cx(&mut self, a: usize, b: usize, tag: Tag, origin: Option<usize>) {
        if self.g.oriented(a, b) {
            self.push(self.cx.clone(), vec![a, b], tag, origin);
            return;
        }
        let r = Tag::ReversePart;
        self.push(self.h.clone(), vec![a], r, None);
        self.push(self.h.clone(), vec![b], r, None);
        self.push(self.cx.clone(), vec![b, a], r, origin);
        self.push(self.h.clone(), vec![a], r, None);
        self.push(self.h.clone(), vec![b], r, None);
        self.reverses += 1;
    }

    fn swap(&mut self, a: usize, b: usize) {
        debug_assert!(self.g.adjacent(a, b));
        self.cx(a, b, Tag::SwapPart, None);
        self.cx(b, a, Tag::SwapPart, None);
        self.cx(a, b, Tag::SwapPart, None);
        let (la, lb) = (self.p2l[a], self.p2l[b]);
        self.l2p.swap(la, lb);
        self.p2l.swap(a, b);
        self.swaps += 1;
    }

    fn emit(&mut self, k: usize, op: &Op) {
        let operands: Vec<usize> = op
            .operands
            .iter()
            .zip(&op.gate.spaces)
            .map(|(&o, sp)| if *sp == Space::Quantum { self.l2p[o] } else { o })
            .collect();
        if op.gate.name == "CNOT" {
            self.cx(operands[0], operands[1], Tag::Original, Some(k));
        } else {
            self.push(op.gate.clone(), operands, Tag::Original, Some(k));
        }
    }

    fn executable(&self, qubits: &[usize]) -> bool {
        let p: Vec<usize> = qubits.iter().map(|&q| self.l2p[q]).collect();
        match p.len() {
            0 | 1 => true,
            _ => {
                let t = *p.last().unwrap();
                p[..p.len() - 1].iter().all(|&c| self.g.adjacent(c, t))
            }
        }
    }

    /// Swaps (as vertex pairs) that make the gate on `qubits` executable.
    fn plan(&self, qubits: &[usize]) -> Result<Vec<(usize, usize)>, MapError> {
        match qubits.len() {
            0 | 1 => Ok(Vec::new()),
            2 => {
                let (a, b) = (self.l2p[qubits[0]], self.l2p[qubits[1]]);
                // both operands walk toward the middle of a shortest path
                let path = self.g.shortest_path(a, b);
                let k = (path.len() - 1) / 2;
                let mut v: Vec<(usize, usize)> = path[..=k].windows(2).map(|w| (w[0], w[1])).collect();
                let back: Vec<usize> = path[k + 1..].iter().rev().copied().collect();
                v.extend(back.windows(2).map(|w| (w[0], w[1])));
                Ok(v)
            }
            3 => self.star_plan(qubits[0], qubits[1], qubits[2]),
            n => Err(MapError::UnsupportedWidth(n)),
        }
    }

    /// Star placement for a three-qubit gate: move the target to the
    /// cheapest vertex of degree two or more, then bring each control to a
    /// distinct neighbour without disturbing the qubits already placed.
    fn star_plan(&self, c1: usize, c2: usize, t: usize) -> Result<Vec<(usize, usize)>, MapError> {
        let g = self.g;
        let (p1, p2, pt) = (self.l2p[c1], self.l2p[c2], self.l2p[t]);
        let mut cand: Vec<(u32, usize)> = (0..g.n)
            .filter(|&v| g.degree(v) >= 2)
            .map(|v| (g.distance(pt, v) + g.distance(p1, v) + g.distance(p2, v), v))
            .collect();
        cand.sort_unstable();
        for (_, v) in cand {
            let mut pos: HashMap<usize, usize> = HashMap::new(); // logical -> vertex overrides
            let mut occ: HashMap<usize, usize> = HashMap::new(); // vertex -> logical overrides
            let at = |pos: &HashMap<usize, usize>, l: usize| pos.get(&l).copied().unwrap_or(self.l2p[l]);
            let mut swaps = Vec::new();
            let mut apply = |pos: &mut HashMap<usize, usize>, occ: &mut HashMap<usize, usize>, path: &[usize]| {
                for w in path.windows(2) {
                    let la = occ.get(&w[0]).copied().unwrap_or(self.p2l[w[0]]);
                    let lb = occ.get(&w[1]).copied().unwrap_or(self.p2l[w[1]]);
                    pos.insert(la, w[1]);
                    pos.insert(lb, w[0]);
                    occ.insert(w[1], la);
                    occ.insert(w[0], lb);
                    swaps.push((w[0], w[1]));
                }
            };
            let path = g.shortest_path(pt, v);
            apply(&mut pos, &mut occ, &path);
            let Some(path) = g.path_avoiding(at(&pos, c1), |w| g.adjacent(w, v), |w| w == v) else { continue };
            apply(&mut pos, &mut occ, &path);
            let q1 = at(&pos, c1);
            let Some(path) = g.path_avoiding(at(&pos, c2), |w| g.adjacent(w, v), |w| w == v || w == q1) else {
                continue;
            };
            apply(&mut pos, &mut occ, &path);
            return Ok(swaps);
        }
        Err(MapError::ToffoliUnplaceable)
    }

    fn route_in_order(&mut self, stream: &GateStream) -> Result<(), MapError> {
        for (k, op) in stream.ops.iter().enumerate() {
            self.check_time()?;
            let qs = op.qubits();
            for (a, b) in self.plan(&qs)? {
                self.swap(a, b);
            }
            debug_assert!(self.executable(&qs));
            self.emit(k, op);
        }
        Ok(())
    }

    fn finish(self, vertices: usize, initial: Vec<usize>) -> (PhysicalCircuit, usize, usize) {
        let pc = PhysicalCircuit { vertices, ops: self.ops, initial, final_mapping: self.l2p };
        (pc, self.swaps, self.reverses)
    }
}

/// Weighted interaction pairs, heaviest first.
fn interaction_pairs(stream: &GateStream) -> Vec<((usize, usize), u32)> {
    let mut w: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for op in &stream.ops {
        let qs = op.qubits();
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                *w.entry((qs[i].min(qs[j]), qs[i].max(qs[j]))).or_insert(0) += 1;
            }
        }
    }
    let mut v: Vec<_> = w.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Greedy embedding of the heaviest interaction edges onto graph edges.
fn wpm_initial(stream: &GateStream, g: &CouplingGraph) -> Vec<usize> {
    let n = g.n;
    let mut place: Vec<Option<usize>> = vec![None; n];
    let mut free = vec![true; n];
    let free_degree = |free: &[bool], v: usize| g.neighbors(v).iter().filter(|&&w| free[w]).count();
    let near = |free: &[bool], place: &[Option<usize>], u: Option<usize>| -> usize {
        // free vertex next to u if possible, else closest to u; without an
        // anchor, the free vertex closest to the placed set with most room
        let key = |v: usize| -> (u32, usize, usize) {
            let d = match u {
                Some(u) => g.distance(u, v),
                None => place.iter().flatten().map(|&p| g.distance(p, v)).min().unwrap_or(0),
            };
            (d, usize::MAX - free_degree(free, v), v)
        };
        (0..n).filter(|&v| free[v]).min_by_key(|&v| key(v)).expect("a free vertex remains")
    };
    for ((a, b), _) in interaction_pairs(stream) {
        match (place[a], place[b]) {
            (Some(_), Some(_)) => {}
            (Some(u), None) | (None, Some(u)) => {
                let y = if place[a].is_none() { a } else { b };
                let v = near(&free, &place, Some(u));
                place[y] = Some(v);
                free[v] = false;
            }
            (None, None) => {
                let u = near(&free, &place, None);
                place[a] = Some(u);
                free[u] = false;
                let v = near(&free, &place, Some(u));
                place[b] = Some(v);
                free[v] = false;
            }
        }
    }
    let mut rest = (0..n).filter(|&v| free[v]);
    place.into_iter().map(|p| p.unwrap_or_else(|| rest.next().expect("bijection"))).collect()
}

struct Dag {
    lanes: Vec<Vec<usize>>,
    succ: Vec<Vec<usize>>,
    indeg: Vec<usize>,
}

fn build_dag(stream: &GateStream, order: &[usize]) -> Dag {
    let mut last: HashMap<(Space, usize), usize> = HashMap::new();
    let mut succ = vec![Vec::new(); order.len()];
    let mut indeg = vec![0; order.len()];
    let mut lanes = Vec::with_capacity(order.len());
    for (pos, &k) in order.iter().enumerate() {
        let op = &stream.ops[k];
        let mut preds: Vec<usize> = Vec::new();
        for l in op.gate.spaces.iter().copied().zip(op.operands.iter().copied()) {
            if let Some(&p) = last.get(&l) {
                preds.push(p);
            }
            last.insert(l, pos);
        }
        preds.sort_unstable();
        preds.dedup();
        for p in preds {
            succ[p].push(pos);
            indeg[pos] += 1;
        }
        lanes.push(op.qubits());
    }
    Dag { lanes, succ, indeg }
}

fn gate_cost(r: &Router, qubits: &[usize]) -> u32 {
    if qubits.len() < 2 {
        return 0;
    }
    let t = r.l2p[*qubits.last().unwrap()];
    qubits[..qubits.len() - 1].iter().map(|&c| r.g.distance(r.l2p[c], t)).sum()
}

/// Front-layer routing over `order`. Swaps are scored by the front-layer
/// distance sum plus a weighted look-ahead term; ties go to the RNG. A
/// stalled search falls back to direct routing of the oldest front gate.
fn sabre_route(r: &mut Router, stream: &GateStream, order: &[usize], rng: &mut ChaCha8Rng) -> Result<(), MapError> {
    let Dag { lanes, succ, mut indeg } = build_dag(stream, order);
    let m = order.len();
    let mut front: Vec<usize> = (0..m).filter(|&p| indeg[p] == 0).collect();
    let mut done = vec![false; m];
    let mut last_swap: Option<(usize, usize)> = None;
    let mut stall = 0;
    let stall_limit = 3 * r.g.n;
    while !front.is_empty() {
        r.check_time()?;
        let mut progressed = true;
        while progressed {
            progressed = false;
            let mut next = Vec::with_capacity(front.len());
            for &p in &front {
                if r.executable(&lanes[p]) {
                    r.emit(order[p], &stream.ops[order[p]]);
                    done[p] = true;
                    progressed = true;
                    for &s in &succ[p] {
                        indeg[s] -= 1;
                        if indeg[s] == 0 {
                            next.push(s);
                        }
                    }
                } else {
                    next.push(p);
                }
            }
            next.sort_unstable();
            if progressed {
                stall = 0;
                last_swap = None;
            }
            front = next;
        }
        if front.is_empty() {
            break;
        }
        if stall >= stall_limit {
            let p = front[0];
            for (a, b) in r.plan(&lanes[p])? {
                r.swap(a, b);
            }
            stall = 0;
            continue;
        }
        let window: Vec<usize> =
            (0..m).filter(|&p| !done[p] && !front.contains(&p) && lanes[p].len() >= 2).take(LOOKAHEAD_OPS).collect();
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for &p in &front {
            for &q in &lanes[p] {
                let v = r.l2p[q];
                for &w in r.g.neighbors(v) {
                    cands.push((v.min(w), v.max(w)));
                }
            }
        }
        cands.sort_unstable();
        cands.dedup();
        if cands.len() > 1 {
            cands.retain(|c| Some(*c) != last_swap);
        }
        let mut best: Vec<(usize, usize)> = Vec::new();
        let mut best_score = f64::INFINITY;
        for &(a, b) in &cands {
            let (la, lb) = (r.p2l[a], r.p2l[b]);
            r.l2p.swap(la, lb);
            let f: u32 = front.iter().map(|&p| gate_cost(r, &lanes[p])).sum();
            let e: u32 = window.iter().map(|&p| gate_cost(r, &lanes[p])).sum();
            r.l2p.swap(la, lb);
            let score = f as f64 + LOOKAHEAD_WEIGHT * e as f64;
            if score < best_score - 1e-9 {
                best_score = score;
                best.clear();
            }
            if (score - best_score).abs() <= 1e-9 {
                best.push((a, b));
            }
        }
        let (a, b) = best[rng.random_range(0..best.len())];
        r.swap(a, b);
        last_swap = Some((a, b));
        stall += 1;
    }
    Ok(())
}

pub fn allocate(
    stream: &GateStream,
    g: &CouplingGraph,
    policy: Allocator,
    seed: u64,
    opts: &AllocOptions,
) -> Result<(PhysicalCircuit, Metrics), MapError> {
    let start = Instant::now();
    if stream.qubit_count > g.n {
        return Err(MapError::TooWide { qubits: stream.qubit_count, vertices: g.n });
    }
    let deadline = opts.timeout.map(|t| start + t);
    let n = g.n;
    let (pc, swaps, reverses) = match policy {
        Allocator::Trivial => {
            let init: Vec<usize> = (0..n).collect();
            let mut r = Router::new(g, init.clone(), deadline);
            r.route_in_order(stream)?;
            r.finish(n, init)
        }
        Allocator::WpmLite => {
            let init = wpm_initial(stream, g);
            let mut r = Router::new(g, init.clone(), deadline);
            r.route_in_order(stream)?;
            r.finish(n, init)
        }
        Allocator::SabreLite => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut init: Vec<usize> = (0..n).collect();
            init.shuffle(&mut rng);
            let m = stream.ops.len();
            // reverse traversal refines the initial placement
            let rev: Vec<usize> = (0..m).rev().collect();
            let mut back = Router::new(g, init, deadline);
            sabre_route(&mut back, stream, &rev, &mut rng)?;
            let init = back.l2p;
            let fwd: Vec<usize> = (0..m).collect();
            let mut r = Router::new(g, init.clone(), deadline);
            sabre_route(&mut r, stream, &fwd, &mut rng)?;
            r.finish(n, init)
        }
    };
    let size = pc.ops.len();
    let metrics = Metrics {
        depth: phys_depth(&pc),
        size,
        added_gates: size - stream.ops.len(),
        swaps,
        reverses,
        alloc_time: start.elapsed().as_secs_f64(),
    };
    debug_assert!(phys_depth(&pc) >= stream_depth(stream));
    Ok((pc, metrics))
}
