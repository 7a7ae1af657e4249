//! Coupling graphs and the three 36-qubit device layouts.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::MapError;

pub const TOPOLOGIES: [&str; 3] = ["grid6x6", "multiring36", "tiled36"];

/// Undirected coupling graph. In directed mode an edge `(a, b)` with
/// `a < b` only supports CNOT with control `a` and target `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingGraph {
    pub name: String,
    pub n: usize,
    /// Normalized `(min, max)` pairs, sorted.
    pub edges: Vec<(usize, usize)>,
    pub directed: bool,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct EdgeList {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl CouplingGraph {
    pub fn new(name: &str, n: usize, edges: &[(usize, usize)]) -> Result<Self, MapError> {
        let bad = |msg: String| MapError::InvalidGraph(msg);
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(bad(format!("self-loop on {a}")));
            }
            if a >= n || b >= n {
                return Err(bad(format!("edge ({a},{b}) outside {n} vertices")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(bad(format!("duplicate edge ({},{})", w[0].0, w[0].1)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let dist: Vec<Vec<u32>> = (0..n).map(|s| bfs(&adj, s, |_| false)).collect();
        if n > 0 && dist[0].contains(&u32::MAX) {
            return Err(bad("graph is not connected".into()));
        }
        Ok(Self { name: name.to_string(), n, edges: norm, directed: false, adj, dist })
    }

    pub fn directed(mut self, on: bool) -> Self {
        self.directed = on;
        self
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.dist[a][b]
    }

    /// True when a CNOT with control `a`, target `b` needs no reversal.
    pub fn oriented(&self, a: usize, b: usize) -> bool {
        !self.directed || a < b
    }

    /// A shortest path `a ..= b`, preferring low-numbered vertices.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        self.path_avoiding(a, |v| v == b, |_| false).expect("graph is connected")
    }

    /// Shortest path from `a` to the first vertex satisfying `goal`, never
    /// entering a vertex for which `blocked` holds.
    pub fn path_avoiding(
        &self,
        a: usize,
        goal: impl Fn(usize) -> bool,
        blocked: impl Fn(usize) -> bool,
    ) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.n];
        let mut q = VecDeque::from([a]);
        parent[a] = a;
        while let Some(v) = q.pop_front() {
            if goal(v) {
                let mut path = vec![v];
                let mut cur = v;
                while cur != a {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX && !blocked(w) {
                    parent[w] = v;
                    q.push_back(w);
                }
            }
        }
        None
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let el = EdgeList { n: self.n, edges: self.edges.iter().map(|&(a, b)| [a, b]).collect() };
        serde_json::to_string(&el).expect("edge list serializes")
    }

    pub fn from_json(name: &str, text: &str) -> Result<Self, MapError> {
        let el: EdgeList = serde_json::from_str(text).map_err(|e| MapError::InvalidGraph(e.to_string()))?;
        let edges: Vec<(usize, usize)> = el.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(name, el.n, &edges)
    }
}

fn bfs(adj: &[Vec<usize>], s: usize, blocked: impl Fn(usize) -> bool) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if d[w] == u32::MAX && !blocked(w) {
                d[w] = d[v] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

fn lattice(edges: &mut Vec<(usize, usize)>, base: usize, rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            let v = base + r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
}

fn ring(edges: &mut Vec<(usize, usize)>, base: usize, len: usize) {
    for k in 0..len {
        edges.push((base + k, base + (k + 1) % len));
    }
}

/// Hub vertices and spokes of the multiring layout: ring 0 is `0..12`,
/// ring 1 is `12..24`, ring 2 is `24..36`.
pub const MULTIRING_SPOKES: [(usize, usize); 8] =
    [(0, 12), (0, 15), (6, 18), (6, 21), (24, 12), (24, 18), (26, 15), (26, 21)];

/// Balanced cuts whose crossing count equals each layout's bisection width.
pub fn witness_side(name: &str) -> Option<Vec<usize>> {
    match name {
        "grid6x6" => Some((0..36).filter(|v| v % 6 < 3).collect()),
        "multiring36" => Some((0..12).chain([12, 19, 20, 21, 22, 23]).collect()),
        "tiled36" => Some((0..18).collect()),
        _ => None,
    }
}

pub fn build_topology(name: &str) -> Result<CouplingGraph, MapError> {
    let mut e = Vec::new();
    match name {
        "grid6x6" => lattice(&mut e, 0, 6, 6),
        "multiring36" => {
            for r in 0..3 {
                ring(&mut e, 12 * r, 12);
            }
            e.extend_from_slice(&MULTIRING_SPOKES);
        }
        "tiled36" => {
            for t in 0..4 {
                lattice(&mut e, 9 * t, 3, 3);
                e.push((9 * t, 9 * ((t + 1) % 4)));
            }
        }
        _ => return Err(MapError::UnknownTopology(name.to_string())),
    }
    CouplingGraph::new(name, 36, &e)
}
