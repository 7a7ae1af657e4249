//! Instance-level dependences between gate accesses to the quantum and
//! classical registers, and their aggregation into a node-level graph.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::affine::{AffineError, Binding};
use crate::gates::{Mode, Space};
use crate::par::{self, Execution};
use crate::scop::Scop;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AccessInstance {
    pub node: usize,
    pub argument: usize,
    pub point: Vec<i64>,
    pub index: i64,
    pub mode: Mode,
    pub space: Space,
    pub timestamp: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DepKind {
    Flow,
    Anti,
    Output,
}

impl DepKind {
    pub fn name(self) -> &'static str {
        match self {
            DepKind::Flow => "flow",
            DepKind::Anti => "anti",
            DepKind::Output => "output",
        }
    }

    /// Classify an ordered pair of accesses; `None` for two pure reads.
    pub fn classify(src: Mode, dst: Mode) -> Option<Self> {
        match (src.writes(), dst.writes()) {
            (true, true) => Some(DepKind::Output),
            (true, false) => Some(DepKind::Flow),
            (false, true) => Some(DepKind::Anti),
            (false, false) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DependenceEdge {
    pub source: AccessInstance,
    pub sink: AccessInstance,
    pub kind: DepKind,
}

impl DependenceEdge {
    fn key(&self) -> (usize, &[i64], usize, &[i64], DepKind, Space, i64) {
        (
            self.source.node,
            &self.source.point,
            self.sink.node,
            &self.sink.point,
            self.kind,
            self.source.space,
            self.source.index,
        )
    }
}

/// Every register access of every instance, with its original timestamp.
pub fn access_instances(scop: &Scop, binding: &Binding) -> Result<Vec<AccessInstance>, AffineError> {
    let mut out = Vec::new();
    for (n, node) in scop.nodes.iter().enumerate() {
        for point in node.domain.enumerate(binding)? {
            let ts = node.schedule.apply(&point, binding)?;
            for (k, arg) in node.args.iter().enumerate() {
                out.push(AccessInstance {
                    node: n,
                    argument: k,
                    point: point.clone(),
                    index: arg.eval(&point, binding)?,
                    mode: node.gate.modes[k],
                    space: node.gate.spaces[k],
                    timestamp: ts.clone(),
                });
            }
        }
    }
    Ok(out)
}

fn sweep(mut accesses: Vec<AccessInstance>) -> Vec<DependenceEdge> {
    accesses.sort_by(|a, b| crate::affine::lex_cmp(&a.timestamp, &b.timestamp).then(a.node.cmp(&b.node)));
    let mut out = Vec::new();
    let mut last_writer: Option<usize> = None;
    let mut readers: Vec<usize> = Vec::new();
    for (i, a) in accesses.iter().enumerate() {
        if a.mode.writes() {
            if let Some(w) = last_writer {
                out.push((w, i, DepKind::Output));
            }
            for &r in &readers {
                out.push((r, i, DepKind::Anti));
            }
            readers.clear();
            last_writer = Some(i);
        } else {
            if let Some(w) = last_writer {
                out.push((w, i, DepKind::Flow));
            }
            readers.push(i);
        }
    }
    out.into_iter()
        .map(|(s, d, kind)| DependenceEdge { source: accesses[s].clone(), sink: accesses[d].clone(), kind })
        .collect()
}

/// Direct dependences (no intermediate write to the same register entry),
/// in canonical order.
pub fn compute_instance_deps(scop: &Scop, binding: &Binding) -> Result<Vec<DependenceEdge>, AffineError> {
    compute_instance_deps_with(scop, binding, Execution::Parallel)
}

pub fn compute_instance_deps_with(
    scop: &Scop,
    binding: &Binding,
    exec: Execution,
) -> Result<Vec<DependenceEdge>, AffineError> {
    let mut by_entry: BTreeMap<(Space, i64), Vec<AccessInstance>> = BTreeMap::new();
    for a in access_instances(scop, binding)? {
        by_entry.entry((a.space, a.index)).or_default().push(a);
    }
    let entries: Vec<Vec<AccessInstance>> = by_entry.into_values().collect();
    let mut edges: Vec<DependenceEdge> =
        par::map(exec, &entries, |acc| sweep(acc.clone())).into_iter().flatten().collect();
    edges.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(edges)
}

fn fmt_tuple(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `src[pt]@<ts> -> dst[pt]@<ts> kind q[idx]`, one edge per line.
pub fn debug_text(scop: &Scop, edges: &[DependenceEdge]) -> String {
    let mut s = String::new();
    for e in edges {
        s.push_str(&format!(
            "{}[{}]@<{}> -> {}[{}]@<{}> {} {}[{}]\n",
            scop.nodes[e.source.node].label(),
            fmt_tuple(&e.source.point),
            fmt_tuple(&e.source.timestamp),
            scop.nodes[e.sink.node].label(),
            fmt_tuple(&e.sink.point),
            fmt_tuple(&e.sink.timestamp),
            e.kind.name(),
            e.source.space.register(),
            e.source.index
        ));
    }
    s
}

/// Node-level relation: all instance edges between two nodes of one kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepGroup {
    pub src: usize,
    pub dst: usize,
    pub kind: DepKind,
    pub count: usize,
    /// Constant `sink.point - source.point` when the relation is uniform.
    pub distance: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepGraph {
    pub node_count: usize,
    pub groups: Vec<DepGroup>,
    /// Strongly connected components in topological order.
    pub sccs: Vec<Vec<usize>>,
}

impl DepGraph {
    pub fn scc_of(&self) -> Vec<usize> {
        let mut v = vec![0; self.node_count];
        for (k, c) in self.sccs.iter().enumerate() {
            for &n in c {
                v[n] = k;
            }
        }
        v
    }
}

pub fn aggregate_relations(node_count: usize, edges: &[DependenceEdge]) -> DepGraph {
    let mut map: BTreeMap<(usize, usize, DepKind), DepGroup> = BTreeMap::new();
    for e in edges {
        let d: Option<Vec<i64>> = if e.source.point.len() == e.sink.point.len() {
            Some(e.sink.point.iter().zip(&e.source.point).map(|(a, b)| a - b).collect())
        } else {
            None
        };
        let g = map.entry((e.source.node, e.sink.node, e.kind)).or_insert_with(|| DepGroup {
            src: e.source.node,
            dst: e.sink.node,
            kind: e.kind,
            count: 0,
            distance: d.clone(),
        });
        g.count += 1;
        if g.distance != d {
            g.distance = None;
        }
    }
    let groups: Vec<DepGroup> = map.into_values().collect();
    let pairs: Vec<(usize, usize)> = groups.iter().map(|g| (g.src, g.dst)).collect();
    DepGraph { node_count, sccs: scc_topo(node_count, &pairs), groups }
}

/// Strongly connected components (Tarjan), ordered topologically with ties
/// broken by the smallest member index.
pub fn scc_topo(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    let mut comp_of = vec![0; n];
    for (k, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = k;
        }
    }
    let m = comps.len();
    let mut indeg = vec![0; m];
    let mut cadj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &(a, b) in edges {
        let (x, y) = (comp_of[a], comp_of[b]);
        if x != y && !cadj[x].contains(&y) {
            cadj[x].push(y);
            indeg[y] += 1;
        }
    }
    let mut ready: std::collections::BTreeSet<(usize, usize)> =
        (0..m).filter(|&c| indeg[c] == 0).map(|c| (comps[c][0], c)).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(&first) = ready.iter().next() {
        ready.remove(&first);
        let c = first.1;
        order.push(comps[c].clone());
        for &d in &cadj[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.insert((comps[d][0], d));
            }
        }
    }
    order
}
