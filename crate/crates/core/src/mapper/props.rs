//! Structural properties of coupling graphs: diameter, degrees and
//! bisection width.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::topology::{witness_side, CouplingGraph};
use crate::par::{self, Execution};

/// Local-search restarts used when hunting for smaller balanced cuts.
pub const BISECTION_TRIALS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphProps {
    pub vertices: usize,
    pub edges: usize,
    pub diameter: u32,
    /// degree -> vertex count
    pub degree_histogram: BTreeMap<usize, usize>,
    pub degree3_count: usize,
    /// Crossing count of the stored witness cut, when the layout has one.
    pub witness_cut: Option<usize>,
    /// Smallest balanced cut found by randomized local search.
    pub search_cut: usize,
}

/// Number of edges with exactly one endpoint in `side`.
pub fn cut_size(g: &CouplingGraph, side: &[bool]) -> usize {
    g.edges.iter().filter(|&&(a, b)| side[a] != side[b]).count()
}

fn is_balanced(n: usize, side: &[bool]) -> bool {
    let k = side.iter().filter(|s| **s).count();
    k == n / 2 || k == n.div_ceil(2)
}

/// One restart: random balanced split, then greedy pair swaps until no
/// swap lowers the cut.
fn local_search(g: &CouplingGraph, seed: u64) -> usize {
    let n = g.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut side = vec![false; n];
    for &v in &order[..n / 2] {
        side[v] = true;
    }
    // gain[v]: cut change if v alone flipped sides (negative is better)
    let gain = |side: &[bool], v: usize| -> i64 {
        g.neighbors(v).iter().map(|&w| if side[w] == side[v] { 1 } else { -1 }).sum()
    };
    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for a in 0..n {
            if !side[a] {
                continue;
            }
            let ga = gain(&side, a);
            for b in 0..n {
                if side[b] {
                    continue;
                }
                let link = if g.adjacent(a, b) { 2 } else { 0 };
                let delta = ga + gain(&side, b) + link;
                if delta < 0 && best.is_none_or(|x| delta < x.0) {
                    best = Some((delta, a, b));
                }
            }
        }
        match best {
            Some((_, a, b)) => {
                side[a] = false;
                side[b] = true;
            }
            None => return cut_size(g, &side),
        }
    }
}

/// Minimum balanced cut over `trials` seeded restarts.
pub fn search_bisection(g: &CouplingGraph, trials: usize, seed: u64, exec: Execution) -> usize {
    if g.n < 2 {
        return 0;
    }
    par::map_range(exec, trials.max(1), |t| local_search(g, seed.wrapping_add(t as u64))).into_iter().min().unwrap_or(0)
}

pub fn graph_props(g: &CouplingGraph, exec: Execution) -> GraphProps {
    let mut degree_histogram = BTreeMap::new();
    for v in 0..g.n {
        *degree_histogram.entry(g.degree(v)).or_insert(0) += 1;
    }
    let witness_cut = witness_side(&g.name).filter(|_| g.n == 36).map(|s| {
        let mut side = vec![false; g.n];
        for v in s {
            side[v] = true;
        }
        debug_assert!(is_balanced(g.n, &side));
        cut_size(g, &side)
    });
    GraphProps {
        vertices: g.n,
        edges: g.edges.len(),
        diameter: g.diameter(),
        degree3_count: (0..g.n).filter(|&v| g.degree(v) >= 3).count(),
        degree_histogram,
        witness_cut,
        search_cut: search_bisection(g, BISECTION_TRIALS, 0, exec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapper::build_topology;

    #[test]
    fn single_edge() {
        let g = CouplingGraph::new("pair", 2, &[(0, 1)]).unwrap();
        let p = graph_props(&g, Execution::Sequential);
        assert_eq!(p.diameter, 1);
        assert_eq!(p.search_cut, 1);
        assert_eq!(p.witness_cut, None);
    }

    #[test]
    fn witnesses_are_balanced() {
        for name in crate::mapper::TOPOLOGIES {
            let mut side = vec![false; 36];
            for v in witness_side(name).unwrap() {
                side[v] = true;
            }
            assert!(is_balanced(36, &side), "{name}");
        }
    }

    #[test]
    fn search_is_seed_deterministic_and_mode_independent() {
        let g = build_topology("grid6x6").unwrap();
        let a = search_bisection(&g, 16, 3, Execution::Sequential);
        let b = search_bisection(&g, 16, 3, Execution::Parallel);
        assert_eq!(a, b);
        assert!(a >= 6);
    }

    #[test]
    fn cycle_bisection_is_two() {
        let edges: Vec<(usize, usize)> = (0..10).map(|k| (k, (k + 1) % 10)).collect();
        let g = CouplingGraph::new("c10", 10, &edges).unwrap();
        assert_eq!(search_bisection(&g, 32, 0, Execution::Sequential), 2);
    }
}
