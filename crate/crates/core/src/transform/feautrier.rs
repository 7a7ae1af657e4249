//! Feautrier-style greedy scheduling: each dimension strongly satisfies as
//! many remaining dependence relations as it can while keeping the rest
//! weakly satisfied.

use std::cmp::Reverse;

use super::search::{least_offsets, Choice, Problem, State};
use super::{Row, ScheduleOptions, ScheduleSolution, TransformError, TransformKind};
use crate::scop::Scop;

fn satisfied(prob: &Problem, state: &State, choices: &[Choice]) -> Option<(Reverse<usize>, Vec<i64>)> {
    let stats = prob.stats(state, choices);
    let mut cons = Vec::new();
    let mut open = Vec::new();
    for (g, l) in stats.lower.iter().enumerate() {
        if let Some(l) = l {
            let (s, d) = prob.groups[g];
            cons.push((s, d, *l));
            open.push((s, d, *l + 1));
        }
    }
    let mut best = least_offsets(prob.n_nodes, &cons)?;
    let mut count = 0;
    for c in open {
        cons.push(c);
        match least_offsets(prob.n_nodes, &cons) {
            Some(o) => {
                best = o;
                count += 1;
            }
            None => {
                cons.pop();
            }
        }
    }
    Some((Reverse(count), best))
}

pub(super) fn schedule(scop: &Scop, opts: &ScheduleOptions) -> Result<ScheduleSolution, TransformError> {
    let prob = Problem::new(scop, opts)?;
    let mut st = prob.initial_state();
    while prob.any_unsat(&st) {
        let dim = st.rows.first().map_or(0, |r| r.len());
        let linear = if prob.all_full_rank(&st) { None } else { prob.search(&st, opts, |c| satisfied(&prob, &st, c)) };
        let linear_rows = linear.as_ref().map(|(c, o)| prob.linear_rows(c, o));
        let carried = linear.as_ref().and_then(|(c, _)| satisfied(&prob, &st, c)).map_or(0, |r| (r.0).0);
        if let (Some(rows), true) = (&linear_rows, carried > 0) {
            prob.push_rows(&mut st, rows);
            continue;
        }
        if let Some(rows) = prob.level_splitter(&st) {
            prob.push_rows(&mut st, &rows);
            continue;
        }
        match linear_rows {
            Some(rows) => prob.push_rows(&mut st, &rows),
            None => return Err(TransformError::NoLegalSchedule { dim }),
        }
    }
    // Remaining iterators, in order, once every dependence is carried.
    while !prob.all_full_rank(&st) {
        let rows: Vec<Row> = (0..prob.n_nodes)
            .map(|n| match st.used[prob.stmt_of[n]].iter().position(|u| !u) {
                Some(iter) => Row::Lin { iter, sign: 1, offset: 0 },
                None => Row::Const(0),
            })
            .collect();
        prob.push_rows(&mut st, &rows);
    }
    Ok(ScheduleSolution { transform: TransformKind::Feautrier, rows: st.rows })
}
