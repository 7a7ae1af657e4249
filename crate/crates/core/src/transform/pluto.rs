//! Pluto-style scheduling: per dimension, minimize the dependence-distance
//! bound `u.p + w` lexicographically subject to `delta >= 0` on every
//! unsatisfied dependence instance.

use super::search::{least_offsets, Choice, Problem, State};
use super::{ScheduleOptions, ScheduleSolution, TransformError, TransformKind};
use crate::scop::Scop;

type Cost = (Vec<i64>, i64);

fn cost(prob: &Problem, state: &State, choices: &[Choice]) -> Option<(Cost, Vec<i64>)> {
    let stats = prob.stats(state, choices);
    let mut cons = Vec::new();
    for (g, l) in stats.lower.iter().enumerate() {
        if let Some(l) = l {
            let (s, d) = prob.groups[g];
            cons.push((s, d, *l));
        }
    }
    let legal = least_offsets(prob.n_nodes, &cons)?;

    let np = prob.n_primary - 1;
    let mut u = vec![0i64; np];
    for up in &stats.upper {
        if let Some(a) = up[0] {
            for k in 0..np {
                if let Some(b) = up[k + 1] {
                    u[k] = u[k].max(b - a);
                }
            }
        }
    }
    let c0: i64 = u.iter().zip(&prob.primary_values[0]).map(|(a, b)| a * b).sum();

    let bounded = |w: i64| {
        let mut all = cons.clone();
        for (g, up) in stats.upper.iter().enumerate() {
            if let Some(m) = up[0] {
                let (s, d) = prob.groups[g];
                all.push((d, s, m - c0 - w));
            }
        }
        least_offsets(prob.n_nodes, &all)
    };

    let mut hi = 0i64;
    for (g, up) in stats.upper.iter().enumerate() {
        if let Some(m) = up[0] {
            let (s, d) = prob.groups[g];
            hi = hi.max(m + legal[d] - legal[s] - c0);
        }
    }
    let mut lo = 0i64;
    let mut best = bounded(hi)?;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match bounded(mid) {
            Some(o) => {
                hi = mid;
                best = o;
            }
            None => lo = mid + 1,
        }
    }
    Some(((u, hi), best))
}

pub(super) fn schedule(
    scop: &Scop,
    max_fusion: bool,
    opts: &ScheduleOptions,
) -> Result<ScheduleSolution, TransformError> {
    let prob = Problem::new(scop, opts)?;
    let mut st = prob.initial_state();
    if !max_fusion && prob.n_nodes > 0 {
        let rows = prob.distribution_splitter();
        prob.push_rows(&mut st, &rows);
    }
    loop {
        let dim = st.rows.first().map_or(0, |r| r.len());
        let full = prob.all_full_rank(&st);
        if full && !prob.any_unsat(&st) {
            break;
        }
        if !full {
            if let Some((choices, offsets)) = prob.search(&st, opts, |c| cost(&prob, &st, c)) {
                let rows = prob.linear_rows(&choices, &offsets);
                prob.push_rows(&mut st, &rows);
                continue;
            }
        }
        match prob.level_splitter(&st) {
            Some(rows) => prob.push_rows(&mut st, &rows),
            None => return Err(TransformError::NoLegalSchedule { dim }),
        }
    }
    let transform = if max_fusion { TransformKind::PlutoMax } else { TransformKind::PlutoMin };
    Ok(ScheduleSolution { transform, rows: st.rows })
}
