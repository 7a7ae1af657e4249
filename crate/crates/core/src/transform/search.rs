//! Shared machinery for the searched schedulers: dependence instances at a
//! set of validation bindings, per-dimension state, candidate enumeration
//! and difference-constraint solving.

use std::collections::BTreeMap;

use super::{Row, ScheduleOptions, TransformError};
use crate::affine::Binding;
use crate::deps::{compute_instance_deps_with, DepKind};
use crate::par;
use crate::scop::Scop;

/// Canonical binding (every parameter at `value`), the canonical binding
/// with each parameter bumped by one, and the scop's own binding.
pub fn validation_bindings(scop: &Scop, value: i64) -> Vec<Binding> {
    binding_plan(scop, value).0
}

/// Bindings plus the names of the parameters varied in entries `1..=k`.
fn binding_plan(scop: &Scop, value: i64) -> (Vec<Binding>, Vec<String>) {
    let mut used: Vec<String> = Vec::new();
    for n in &scop.nodes {
        let exprs = n.domain.constraints.iter().map(|c| &c.expr).chain(n.args.iter());
        for e in exprs {
            for (p, c) in &e.params {
                if *c != 0 && !used.contains(p) {
                    used.push(p.clone());
                }
            }
        }
    }
    used.sort();
    let mut base = scop.binding.clone();
    for p in &used {
        base.set(p, value);
    }
    let mut out = vec![base.clone()];
    for p in &used {
        let mut b = base.clone();
        b.set(p, value + 1);
        out.push(b);
    }
    if !out.contains(&scop.binding) {
        out.push(scop.binding.clone());
    }
    (out, used)
}

/// Iterator choice of one statement in one dimension: `(iterator, sign)`,
/// or `None` for a constant row.
pub(crate) type Choice = Option<(usize, i64)>;

#[derive(Clone, Debug)]
pub(crate) struct Pair {
    pub group: usize,
    pub binding: usize,
    pub src: Vec<i64>,
    pub dst: Vec<i64>,
}

pub(crate) struct Problem {
    pub n_nodes: usize,
    pub stmt_of: Vec<usize>,
    pub stmt_dim: Vec<usize>,
    pub single_point: Vec<bool>,
    /// Number of bindings used for the bound cost: canonical plus one per parameter.
    pub n_primary: usize,
    pub primary_values: Vec<Vec<i64>>,
    pub groups: Vec<(usize, usize)>,
    pub pairs: Vec<Pair>,
}

pub(crate) struct State {
    pub unsat: Vec<bool>,
    pub used: Vec<Vec<bool>>,
    pub rows: Vec<Vec<Row>>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Stats {
    /// Per group: max over unsatisfied pairs of `-(lin_dst - lin_src)`.
    pub lower: Vec<Option<i64>>,
    /// Per group and primary binding: max over all pairs of `lin_dst - lin_src`.
    pub upper: Vec<Vec<Option<i64>>>,
}

impl Problem {
    pub fn new(scop: &Scop, opts: &ScheduleOptions) -> Result<Self, TransformError> {
        let (bindings, param_names) = binding_plan(scop, opts.validation_value);
        let n_primary = param_names.len() + 1;
        let primary_values =
            bindings[..n_primary].iter().map(|b| param_names.iter().map(|p| b.get(p).unwrap_or(0)).collect()).collect();

        let stmt_of: Vec<usize> = scop.nodes.iter().map(|n| n.group).collect();
        let n_stmts = scop.statement_count();
        let mut stmt_dim = vec![0; n_stmts];
        let mut single_point = vec![true; n_stmts];
        for n in &scop.nodes {
            stmt_dim[n.group] = n.dim();
            for b in &bindings {
                if n.domain.enumerate(b)?.len() > 1 {
                    single_point[n.group] = false;
                }
            }
        }

        let mut group_index: BTreeMap<(usize, usize, DepKind), usize> = BTreeMap::new();
        let mut pairs = Vec::new();
        for (bi, b) in bindings.iter().enumerate() {
            for e in compute_instance_deps_with(scop, b, opts.exec)? {
                let key = (e.source.node, e.sink.node, e.kind);
                let next = group_index.len();
                let g = *group_index.entry(key).or_insert(next);
                pairs.push(Pair { group: g, binding: bi, src: e.source.point, dst: e.sink.point });
            }
        }
        let mut groups = vec![(0, 0); group_index.len()];
        for ((s, d, _), g) in &group_index {
            groups[*g] = (*s, *d);
        }
        Ok(Problem {
            n_nodes: scop.nodes.len(),
            stmt_of,
            stmt_dim,
            single_point,
            n_primary,
            primary_values,
            groups,
            pairs,
        })
    }

    pub fn n_stmts(&self) -> usize {
        self.stmt_dim.len()
    }

    pub fn initial_state(&self) -> State {
        State {
            unsat: vec![true; self.pairs.len()],
            used: self.stmt_dim.iter().map(|&d| vec![false; d]).collect(),
            rows: vec![Vec::new(); self.n_nodes],
        }
    }

    pub fn choices(&self, state: &State, s: usize) -> Vec<Choice> {
        let mut v = Vec::new();
        for (k, used) in state.used[s].iter().enumerate() {
            if !used {
                v.push(Some((k, 1)));
                if !self.single_point[s] {
                    v.push(Some((k, -1)));
                }
            }
        }
        if v.is_empty() {
            v.push(None);
        }
        v
    }

    fn lin(&self, choices: &[Choice], node: usize, point: &[i64]) -> i64 {
        match choices[self.stmt_of[node]] {
            Some((k, s)) => s * point[k],
            None => 0,
        }
    }

    pub fn stats(&self, state: &State, choices: &[Choice]) -> Stats {
        let ng = self.groups.len();
        let mut st = Stats { lower: vec![None; ng], upper: vec![vec![None; self.n_primary]; ng] };
        for (i, p) in self.pairs.iter().enumerate() {
            let (s, d) = self.groups[p.group];
            let diff = self.lin(choices, d, &p.dst) - self.lin(choices, s, &p.src);
            if state.unsat[i] {
                let l = &mut st.lower[p.group];
                *l = Some(l.map_or(-diff, |x: i64| x.max(-diff)));
            }
            if p.binding < self.n_primary {
                let u = &mut st.upper[p.group][p.binding];
                *u = Some(u.map_or(diff, |x: i64| x.max(diff)));
            }
        }
        st
    }

    /// Rows of a linear dimension for the given choices and offsets.
    pub fn linear_rows(&self, choices: &[Choice], offsets: &[i64]) -> Vec<Row> {
        (0..self.n_nodes)
            .map(|n| match choices[self.stmt_of[n]] {
                Some((iter, sign)) => Row::Lin { iter, sign, offset: offsets[n] },
                None => Row::Const(offsets[n]),
            })
            .collect()
    }

    pub fn push_rows(&self, state: &mut State, rows: &[Row]) {
        for (n, r) in rows.iter().enumerate() {
            state.rows[n].push(*r);
            if let Row::Lin { iter, .. } = r {
                state.used[self.stmt_of[n]][*iter] = true;
            }
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if state.unsat[i] {
                let (s, d) = self.groups[p.group];
                if rows[d].eval(&p.dst) > rows[s].eval(&p.src) {
                    state.unsat[i] = false;
                }
            }
        }
    }

    pub fn all_full_rank(&self, state: &State) -> bool {
        state.used.iter().all(|u| u.iter().all(|x| *x))
    }

    pub fn any_unsat(&self, state: &State) -> bool {
        state.unsat.iter().any(|x| *x)
    }

    /// Node pairs that still carry unsatisfied instances.
    pub fn unsat_edges(&self, state: &State) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.groups.len()];
        for (i, p) in self.pairs.iter().enumerate() {
            if state.unsat[i] {
                seen[p.group] = true;
            }
        }
        let mut v: Vec<(usize, usize)> = self.groups.iter().zip(seen).filter(|(_, s)| *s).map(|(g, _)| *g).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Splitter placing each strongly connected component of the
    /// unsatisfied graph at its longest-path level. `None` when the
    /// splitter would order nothing.
    pub fn level_splitter(&self, state: &State) -> Option<Vec<Row>> {
        let edges = self.unsat_edges(state);
        let sccs = crate::deps::scc_topo(self.n_nodes, &edges);
        let mut comp = vec![0; self.n_nodes];
        for (k, c) in sccs.iter().enumerate() {
            for &n in c {
                comp[n] = k;
            }
        }
        let mut level = vec![0i64; sccs.len()];
        let mut crossing = false;
        // sccs are topologically ordered, so one pass in order suffices.
        let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); sccs.len()];
        for &(a, b) in &edges {
            if comp[a] != comp[b] {
                by_src[comp[a]].push(comp[b]);
                crossing = true;
            }
        }
        if !crossing {
            return None;
        }
        for c in 0..sccs.len() {
            for &d in &by_src[c] {
                level[d] = level[d].max(level[c] + 1);
            }
        }
        Some((0..self.n_nodes).map(|n| Row::Const(level[comp[n]])).collect())
    }

    /// Splitter giving every component of the full dependence graph its own
    /// topological index.
    pub fn distribution_splitter(&self) -> Vec<Row> {
        let sccs = crate::deps::scc_topo(self.n_nodes, &self.groups);
        let mut rows = vec![Row::Const(0); self.n_nodes];
        for (k, c) in sccs.iter().enumerate() {
            for &n in c {
                rows[n] = Row::Const(k as i64);
            }
        }
        rows
    }

    /// Evaluate `eval` on every combination of per-statement choices and
    /// return the one with the smallest `(cost, combination)`.
    pub fn search<C, F>(&self, state: &State, opts: &ScheduleOptions, eval: F) -> Option<(Vec<Choice>, Vec<i64>)>
    where
        C: Ord + Send + Clone,
        F: Fn(&[Choice]) -> Option<(C, Vec<i64>)> + Sync + Send,
    {
        let options: Vec<Vec<Choice>> = (0..self.n_stmts()).map(|s| self.choices(state, s)).collect();
        let total = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len()));
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut digits = vec![0; options.len()];
            for s in (0..options.len()).rev() {
                digits[s] = idx % options[s].len();
                idx /= options[s].len();
            }
            digits
        };
        let pick = |digits: &[usize]| -> Vec<Choice> { digits.iter().zip(&options).map(|(d, o)| o[*d]).collect() };
        match total {
            Some(t) if t <= opts.exhaustive_limit => {
                let results = par::map_range(opts.exec, t, |i| eval(&pick(&decode(i))).map(|(c, off)| (c, i, off)));
                let best = results.into_iter().flatten().min_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)))?;
                Some((pick(&decode(best.1)), best.2))
            }
            _ => {
                let mut digits = vec![0; options.len()];
                let mut best = eval(&pick(&digits));
                loop {
                    let mut improved = false;
                    for s in 0..options.len() {
                        let cands: Vec<usize> = (0..options[s].len()).collect();
                        let scored = par::map(opts.exec, &cands, |&d| {
                            let mut t = digits.clone();
                            t[s] = d;
                            eval(&pick(&t)).map(|r| (r, t))
                        });
                        for ((c, off), t) in scored.into_iter().flatten() {
                            let better = match &best {
                                None => true,
                                Some((bc, _)) => (&c, &t) < (bc, &digits),
                            };
                            if better {
                                best = Some((c, off));
                                digits = t;
                                improved = true;
                            }
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                best.map(|(_, off)| (pick(&digits), off))
            }
        }
    }
}

/// Least non-negative solution of `o[d] - o[s] >= c` for every `(s, d, c)`,
/// or `None` when the system is infeasible.
pub(crate) fn least_offsets(n: usize, cons: &[(usize, usize, i64)]) -> Option<Vec<i64>> {
    let mut o = vec![0i64; n];
    for round in 0..=n {
        let mut changed = false;
        for &(s, d, c) in cons {
            if o[s] + c > o[d] {
                o[d] = o[s] + c;
                changed = true;
            }
        }
        if !changed {
            return Some(o);
        }
        if round == n {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_constraints() {
        assert_eq!(least_offsets(3, &[(0, 1, 2), (1, 2, 1)]), Some(vec![0, 2, 3]));
        assert_eq!(least_offsets(2, &[(0, 1, 1), (1, 0, 0)]), None);
        assert_eq!(least_offsets(2, &[(0, 1, -3)]), Some(vec![0, 0]));
    }
}
