//! Affine expressions, integer sets and maps over iterators and symbolic
//! parameters, plus the time-composition rules used to assemble programs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error("parameter `{0}` is not bound")]
    MissingParam(String),
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("iterator `{0}` is unbounded under the given binding")]
    Unbounded(String),
}

/// Values for symbolic size parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binding(pub BTreeMap<String, i64>);

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.get(name).copied()
    }

    pub fn set(&mut self, name: &str, value: i64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(|s| s.as_str())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `sum(coeffs[k] * x_k) + sum(params[p] * p) + constant`.
///
/// Iterators are positional; the owning set or map carries their names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineExpr {
    pub coeffs: Vec<i64>,
    pub params: BTreeMap<String, i64>,
    pub constant: i64,
}

impl AffineExpr {
    pub fn constant(c: i64) -> Self {
        Self { constant: c, ..Self::default() }
    }

    /// The iterator at position `k`.
    pub fn iter(k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        Self { coeffs, ..Self::default() }
    }

    pub fn param(name: &str) -> Self {
        let mut params = BTreeMap::new();
        params.insert(name.to_string(), 1);
        Self { params, ..Self::default() }
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn set_coeff(&mut self, k: usize, v: i64) {
        if self.coeffs.len() <= k {
            self.coeffs.resize(k + 1, 0);
        }
        self.coeffs[k] = v;
    }

    pub fn param_coeff(&self, name: &str) -> i64 {
        self.params.get(name).copied().unwrap_or(0)
    }

    /// True when no iterator appears.
    pub fn is_iter_free(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True when neither iterators nor parameters appear.
    pub fn is_constant(&self) -> bool {
        self.is_iter_free() && self.params.values().all(|&c| c == 0)
    }

    /// Highest iterator position with a nonzero coefficient.
    pub fn max_iter(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn normalized(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self.params.retain(|_, v| *v != 0);
        self
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            params: self.params.iter().map(|(p, c)| (p.clone(), c * k)).collect(),
            constant: self.constant * k,
        }
        .normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        let mut params = self.params.clone();
        for (p, c) in &other.params {
            *params.entry(p.clone()).or_insert(0) += c;
        }
        Self { coeffs, params, constant: self.constant + other.constant }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn add_const(&self, c: i64) -> Self {
        let mut e = self.clone();
        e.constant += c;
        e
    }

    /// Value of the parameter part under `binding`.
    pub fn param_value(&self, binding: &Binding) -> Result<i64, AffineError> {
        let mut v = self.constant;
        for (p, c) in &self.params {
            if *c != 0 {
                let x = binding.get(p).ok_or_else(|| AffineError::MissingParam(p.clone()))?;
                v += c * x;
            }
        }
        Ok(v)
    }

    pub fn eval(&self, point: &[i64], binding: &Binding) -> Result<i64, AffineError> {
        if let Some(m) = self.max_iter() {
            if m >= point.len() {
                return Err(AffineError::Arity { expected: m + 1, got: point.len() });
            }
        }
        let mut v = self.param_value(binding)?;
        for (c, x) in self.coeffs.iter().zip(point) {
            v += c * x;
        }
        Ok(v)
    }

    /// Replace every parameter by its bound value.
    pub fn instantiate(&self, binding: &Binding) -> Result<Self, AffineError> {
        Ok(Self { coeffs: self.coeffs.clone(), params: BTreeMap::new(), constant: self.param_value(binding)? }
            .normalized())
    }

    /// Substitute iterator `k` by `e` (whose iterators live in the same space).
    pub fn substitute(&self, k: usize, e: &Self) -> Self {
        let c = self.coeff(k);
        if c == 0 {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.set_coeff(k, 0);
        rest.add(&e.scale(c))
    }

    /// Rewrite every iterator through `images` (iterator `k` becomes `images[k]`).
    pub fn compose(&self, images: &[Self]) -> Self {
        let mut out = Self { coeffs: vec![], params: self.params.clone(), constant: self.constant };
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                out = out.add(&images[k].scale(c));
            }
        }
        out.normalized()
    }

    fn content_gcd(&self) -> i64 {
        let mut g = 0;
        for &c in self.coeffs.iter().chain(self.params.values()) {
            g = gcd(g, c);
        }
        g
    }

    /// Render with the given iterator names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a AffineExpr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(i64, String)> = Vec::new();
        for (k, &c) in self.expr.coeffs.iter().enumerate() {
            if c != 0 {
                let name = self.names.get(k).cloned().unwrap_or_else(|| format!("x{k}"));
                terms.push((c, name));
            }
        }
        for (p, &c) in &self.expr.params {
            if c != 0 {
                terms.push((c, p.clone()));
            }
        }
        let mut out = String::new();
        for (i, (c, name)) in terms.iter().enumerate() {
            let mag = c.abs();
            if *c < 0 {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            if mag != 1 {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(name);
        }
        let c = self.expr.constant;
        if terms.is_empty() {
            out.push_str(&c.to_string());
        } else if c > 0 {
            out.push_str(&format!("+{c}"));
        } else if c < 0 {
            out.push_str(&c.to_string());
        }
        f.write_str(&out)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// `expr >= 0`
    Ge,
    /// `expr == 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub expr: AffineExpr,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn ge(expr: AffineExpr) -> Self {
        Self { expr, kind: ConstraintKind::Ge }
    }

    pub fn eq(expr: AffineExpr) -> Self {
        Self { expr, kind: ConstraintKind::Eq }
    }

    pub fn holds(&self, point: &[i64], binding: &Binding) -> Result<bool, AffineError> {
        let v = self.expr.eval(point, binding)?;
        Ok(match self.kind {
            ConstraintKind::Ge => v >= 0,
            ConstraintKind::Eq => v == 0,
        })
    }

    /// Equivalent list of `>= 0` rows.
    pub fn rows(&self) -> Vec<AffineExpr> {
        match self.kind {
            ConstraintKind::Ge => vec![self.expr.clone()],
            ConstraintKind::Eq => vec![self.expr.clone(), self.expr.scale(-1)],
        }
    }
}

/// Tighten a `>= 0` row by the gcd of its variable part.
pub fn tighten(row: &AffineExpr) -> AffineExpr {
    let g = row.content_gcd();
    if g <= 1 {
        return row.clone().normalized();
    }
    AffineExpr {
        coeffs: row.coeffs.iter().map(|c| c / g).collect(),
        params: row.params.iter().map(|(p, c)| (p.clone(), c / g)).collect(),
        constant: floor_div(row.constant, g),
    }
    .normalized()
}

/// Fourier-Motzkin elimination of iterator `k` from `>= 0` rows.
///
/// Parameters stay symbolic; the result is the (rational) shadow, tightened
/// by gcd. Integer exactness is restored by checking membership at leaves.
pub fn fm_eliminate(rows: &[AffineExpr], k: usize) -> Vec<AffineExpr> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut out: Vec<AffineExpr> = Vec::new();
    for r in rows {
        match r.coeff(k).cmp(&0) {
            Ordering::Greater => lower.push(r),
            Ordering::Less => upper.push(r),
            Ordering::Equal => out.push(r.clone()),
        }
    }
    for l in &lower {
        for u in &upper {
            let a = l.coeff(k);
            let b = -u.coeff(k);
            let comb = l.scale(b).add(&u.scale(a));
            out.push(comb);
        }
    }
    dedup_rows(out.iter().map(tighten).filter(|r| !is_trivial(r)).collect())
}

fn is_trivial(row: &AffineExpr) -> bool {
    row.is_constant() && row.constant >= 0
}

pub fn dedup_rows(mut rows: Vec<AffineExpr>) -> Vec<AffineExpr> {
    rows.sort();
    rows.dedup();
    rows
}

/// An integer set `{ [iterators] : constraints }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerSet {
    pub iterators: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl IntegerSet {
    pub fn new(iterators: Vec<String>, constraints: Vec<Constraint>) -> Self {
        Self { iterators, constraints }
    }

    pub fn dim(&self) -> usize {
        self.iterators.len()
    }

    pub fn contains(&self, point: &[i64], binding: &Binding) -> Result<bool, AffineError> {
        if point.len() != self.dim() {
            return Err(AffineError::Arity { expected: self.dim(), got: point.len() });
        }
        for c in &self.constraints {
            if !c.holds(point, binding)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All `>= 0` rows.
    pub fn rows(&self) -> Vec<AffineExpr> {
        self.constraints.iter().flat_map(|c| c.rows()).collect()
    }

    /// Per-level projections: entry `k` only mentions iterators `0..=k`.
    pub fn projections(rows: Vec<AffineExpr>, dim: usize) -> Vec<Vec<AffineExpr>> {
        let mut proj = vec![Vec::new(); dim];
        let mut cur = dedup_rows(rows);
        for k in (0..dim).rev() {
            proj[k] = cur.clone();
            cur = fm_eliminate(&cur, k);
        }
        proj
    }

    /// Inclusive `[lo, hi]` for iterator `k` given the outer prefix.
    fn level_bounds(&self, rows: &[AffineExpr], k: usize, prefix: &[i64]) -> Result<(i64, i64), AffineError> {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        let mut empty = false;
        for r in rows {
            let a = r.coeff(k);
            let mut rest = r.constant;
            for (j, &x) in prefix.iter().enumerate() {
                rest += r.coeff(j) * x;
            }
            match a.cmp(&0) {
                Ordering::Greater => {
                    let b = ceil_div(-rest, a);
                    lo = Some(lo.map_or(b, |l| l.max(b)));
                }
                Ordering::Less => {
                    let b = floor_div(rest, -a);
                    hi = Some(hi.map_or(b, |h| h.min(b)));
                }
                Ordering::Equal => {
                    if rest < 0 {
                        empty = true;
                    }
                }
            }
        }
        if empty {
            return Ok((1, 0));
        }
        match (lo, hi) {
            (Some(l), Some(h)) => Ok((l, h)),
            _ => Err(AffineError::Unbounded(self.iterators[k].clone())),
        }
    }

    /// All points in lexicographic order.
    pub fn enumerate(&self, binding: &Binding) -> Result<Vec<Vec<i64>>, AffineError> {
        let dim = self.dim();
        let mut rows = Vec::new();
        for r in self.rows() {
            rows.push(r.instantiate(binding)?);
        }
        if dim == 0 {
            return Ok(if rows.iter().all(|r| r.constant >= 0) { vec![vec![]] } else { vec![] });
        }
        if rows.iter().any(|r| r.is_constant() && r.constant < 0) {
            return Ok(vec![]);
        }
        let proj = Self::projections(rows, dim);
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(dim);
        self.scan(&proj, 0, &mut prefix, binding, &mut out)?;
        Ok(out)
    }

    fn scan(
        &self,
        proj: &[Vec<AffineExpr>],
        k: usize,
        prefix: &mut Vec<i64>,
        binding: &Binding,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<(), AffineError> {
        let (lo, hi) = self.level_bounds(&proj[k], k, prefix)?;
        for x in lo..=hi {
            prefix.push(x);
            if k + 1 == self.dim() {
                if self.contains(prefix, binding)? {
                    out.push(prefix.clone());
                }
            } else {
                self.scan(proj, k + 1, prefix, binding, out)?;
            }
            prefix.pop();
        }
        Ok(())
    }
}

/// A multi-output affine function of a statement's iterators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub iterators: Vec<String>,
    pub outputs: Vec<AffineExpr>,
}

impl AffineMap {
    pub fn new(iterators: Vec<String>, outputs: Vec<AffineExpr>) -> Self {
        Self { iterators, outputs }
    }

    pub fn identity(iterators: Vec<String>) -> Self {
        let outputs = (0..iterators.len()).map(AffineExpr::iter).collect();
        Self { iterators, outputs }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn apply(&self, point: &[i64], binding: &Binding) -> Result<Vec<i64>, AffineError> {
        self.outputs.iter().map(|e| e.eval(point, binding)).collect()
    }

    /// Append constant zero outputs up to `len`.
    pub fn padded(&self, len: usize) -> Self {
        let mut m = self.clone();
        while m.outputs.len() < len {
            m.outputs.push(AffineExpr::constant(0));
        }
        m
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let outs: Vec<String> = self.outputs.iter().map(|e| e.display(&self.iterators).to_string()).collect();
        write!(f, "[{}] -> <{}>", self.iterators.join(","), outs.join(","))
    }
}

/// Strict lexicographic order, padding the shorter tuple with zeros.
pub fn lex_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let n = a.len().max(b.len());
    for k in 0..n {
        let x = a.get(k).copied().unwrap_or(0);
        let y = b.get(k).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

pub fn lex_less(a: &[i64], b: &[i64]) -> bool {
    lex_cmp(a, b) == Ordering::Less
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComposeMode {
    /// Statement level: scalar `k` is prepended to the k-th schedule.
    Prefix,
    /// Gate level inside one statement: scalar `k` is appended.
    Suffix,
}

/// Time composition of schedules with scalar dimensions.
pub fn compose_time(schedules: &[AffineMap], mode: ComposeMode) -> Vec<AffineMap> {
    if schedules.len() < 2 {
        return schedules.to_vec();
    }
    schedules
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut m = s.clone();
            let scalar = AffineExpr::constant(k as i64);
            match mode {
                ComposeMode::Prefix => m.outputs.insert(0, scalar),
                ComposeMode::Suffix => m.outputs.push(scalar),
            }
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn eval_examples() {
        let b = Binding::new();
        assert_eq!(AffineExpr::iter(0).add_const(1).eval(&[3], &b).unwrap(), 4);
        assert_eq!(AffineExpr::constant(0).eval(&[9], &b).unwrap(), 0);
        let e = AffineExpr::iter(0).add(&AffineExpr::iter(1)).add_const(3);
        assert_eq!(e.eval(&[2, 1], &b).unwrap(), 6);
        assert_eq!(AffineExpr::param("N").eval(&[], &b), Err(AffineError::MissingParam("N".into())));
    }

    #[test]
    fn enumerate_examples() {
        let m = IntegerSet::new(
            names(&["t"]),
            vec![
                Constraint::ge(AffineExpr::iter(0).add_const(-1)),
                Constraint::ge(AffineExpr::param("M").sub(&AffineExpr::iter(0))),
            ],
        );
        let pts = m.enumerate(&Binding::new().with("M", 8)).unwrap();
        assert_eq!(pts, (1..=8).map(|t| vec![t]).collect::<Vec<_>>());

        let n = IntegerSet::new(
            names(&["i"]),
            vec![
                Constraint::ge(AffineExpr::iter(0)),
                Constraint::ge(AffineExpr::param("N").sub(&AffineExpr::iter(0)).add_const(-1)),
                Constraint::ge(AffineExpr::constant(2).sub(&AffineExpr::iter(0))),
            ],
        );
        assert!(n.enumerate(&Binding::new().with("N", 0)).unwrap().is_empty());
        assert_eq!(n.enumerate(&Binding::new().with("N", 6)).unwrap(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn unbounded_is_error() {
        let s = IntegerSet::new(names(&["i"]), vec![Constraint::ge(AffineExpr::iter(0))]);
        assert!(matches!(s.enumerate(&Binding::new()), Err(AffineError::Unbounded(_))));
    }

    #[test]
    fn triangle_enumeration() {
        // 0 <= j <= i < N
        let s = IntegerSet::new(
            names(&["i", "j"]),
            vec![
                Constraint::ge(AffineExpr::iter(1)),
                Constraint::ge(AffineExpr::iter(0).sub(&AffineExpr::iter(1))),
                Constraint::ge(AffineExpr::param("N").sub(&AffineExpr::iter(0)).add_const(-1)),
            ],
        );
        assert_eq!(s.enumerate(&Binding::new().with("N", 6)).unwrap().len(), 21);
    }

    #[test]
    fn lex_examples() {
        assert!(lex_less(&[0, 3], &[1, 0]));
        assert!(lex_less(&[0, 5, 0], &[0, 5, 1]));
        assert!(!lex_less(&[2, 2], &[2, 2]));
        assert!(lex_less(&[1], &[1, 1]));
    }

    #[test]
    fn compose_examples() {
        let id = AffineMap::identity(names(&["i"]));
        let pre = compose_time(&[id.clone(), id.clone()], ComposeMode::Prefix);
        assert_eq!(pre[0].outputs, vec![AffineExpr::constant(0), AffineExpr::iter(0)]);
        assert_eq!(pre[1].outputs, vec![AffineExpr::constant(1), AffineExpr::iter(0)]);
        let suf = compose_time(&[id.clone(), id.clone()], ComposeMode::Suffix);
        assert_eq!(suf[0].outputs, vec![AffineExpr::iter(0), AffineExpr::constant(0)]);
        assert_eq!(suf[1].outputs, vec![AffineExpr::iter(0), AffineExpr::constant(1)]);
        assert_eq!(compose_time(std::slice::from_ref(&id), ComposeMode::Prefix), vec![id]);
    }

    #[test]
    fn apply_examples() {
        let b = Binding::new();
        let z = AffineMap::new(names(&["i"]), vec![AffineExpr::constant(0)]);
        assert_eq!(z.apply(&[4], &b).unwrap(), vec![0]);
        let s = AffineMap::new(names(&["i"]), vec![AffineExpr::iter(0).add_const(1)]);
        assert_eq!(s.apply(&[4], &b).unwrap(), vec![5]);
        assert_eq!(AffineMap::identity(names(&["i"])).apply(&[7], &b).unwrap(), vec![7]);
    }

    #[test]
    fn display_forms() {
        let n = names(&["t", "i"]);
        let e = AffineExpr::iter(0).add(&AffineExpr::iter(1)).add_const(3);
        assert_eq!(e.display(&n).to_string(), "t+i+3");
        let e = AffineExpr::param("N").scale(2).sub(&AffineExpr::iter(1)).add_const(-1);
        assert_eq!(e.display(&n).to_string(), "-i+2*N-1");
        assert_eq!(AffineExpr::constant(-4).display(&n).to_string(), "-4");
    }

    #[test]
    fn div_rounding() {
        assert_eq!(floor_div(-3, 2), -2);
        assert_eq!(ceil_div(-3, 2), -1);
        assert_eq!(floor_div(3, 2), 1);
        assert_eq!(ceil_div(3, 2), 2);
    }
}
