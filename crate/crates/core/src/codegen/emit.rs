//! C-like loop listings.

use super::scan::{AstNode, Bound, LoopAst};
use crate::affine::{ceil_div, floor_div, AffineExpr, Binding};

struct Printer<'a> {
    binding: &'a Binding,
    names: Vec<String>,
    images: Vec<AffineExpr>,
    out: String,
}

impl Printer<'_> {
    fn resolve(&self, e: &AffineExpr) -> AffineExpr {
        let e = e.compose(&self.images);
        let mut inst = e.clone();
        inst.params.clear();
        let pv = AffineExpr { coeffs: vec![], params: e.params.clone(), constant: 0 }.param_value(self.binding);
        match pv {
            Ok(v) => inst.add_const(v),
            Err(_) => e,
        }
    }

    fn expr(&self, e: &AffineExpr) -> String {
        self.resolve(e).display(&self.names).to_string()
    }

    fn bound(&self, b: &Bound, lower: bool) -> (String, Option<i64>) {
        match b {
            Bound::Term { expr, div } => {
                let e = self.resolve(expr);
                if e.is_constant() {
                    let v = if lower { ceil_div(e.constant, *div) } else { floor_div(e.constant, *div) };
                    (v.to_string(), Some(v))
                } else if *div == 1 {
                    (e.display(&self.names).to_string(), None)
                } else {
                    let f = if lower { "ceild" } else { "floord" };
                    (format!("{f}({}, {div})", e.display(&self.names)), None)
                }
            }
            Bound::Max(items) | Bound::Min(items) => {
                let is_max = matches!(b, Bound::Max(_));
                let parts: Vec<(String, Option<i64>)> = items.iter().map(|i| self.bound(i, lower)).collect();
                if parts.iter().all(|p| p.1.is_some()) {
                    let vals = parts.iter().map(|p| p.1.unwrap());
                    let v = if is_max { vals.max().unwrap() } else { vals.min().unwrap() };
                    return (v.to_string(), Some(v));
                }
                let f = if is_max { "max" } else { "min" };
                let mut s = parts.last().unwrap().0.clone();
                for p in parts.iter().rev().skip(1) {
                    s = format!("{f}({}, {s})", p.0);
                }
                (s, None)
            }
        }
    }

    fn line(&mut self, depth: usize, s: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn node(&mut self, n: &AstNode, depth: usize) {
        match n {
            AstNode::Loop { dim, lower, upper, body } => {
                let c = &self.names[*dim].clone();
                let lo = self.bound(lower, true).0;
                let hi = self.bound(upper, false).0;
                self.line(depth, &format!("for (int {c} = {lo}; {c} <= {hi}; {c} += 1) {{"));
                for b in body {
                    self.node(b, depth + 1);
                }
                self.line(depth, "}");
            }
            AstNode::Bind { dim, value, body } => {
                let saved = self.images[*dim].clone();
                self.images[*dim] = self.resolve(value);
                for b in body {
                    self.node(b, depth);
                }
                self.images[*dim] = saved;
            }
            AstNode::Leaf(leaf) => {
                let mut call = leaf.listing.clone();
                for a in &leaf.args {
                    call.push_str(&format!("[{}]", self.expr(a)));
                }
                call.push(';');
                let mut conds = Vec::new();
                for g in &leaf.guards {
                    let c = self.expr(&AffineExpr::iter(g.dim));
                    let (lo, lv) = self.bound(&g.lower, true);
                    let (hi, hv) = self.bound(&g.upper, false);
                    match (lv, hv) {
                        (Some(a), Some(b)) if a == b => conds.push(format!("{c} == {a}")),
                        _ => {
                            conds.push(format!("{c} >= {lo}"));
                            conds.push(format!("{c} <= {hi}"));
                        }
                    }
                }
                if conds.is_empty() {
                    self.line(depth, &call);
                } else {
                    self.line(depth, &format!("if ({}) {{", conds.join(" && ")));
                    self.line(depth + 1, &call);
                    self.line(depth, "}");
                }
            }
        }
    }
}

/// Render the loop tree with `binding` substituted.
pub fn emit_loops(ast: &LoopAst, binding: &Binding) -> String {
    let mut p = Printer {
        binding,
        names: (0..ast.dims).map(|d| format!("c{d}")).collect(),
        images: (0..ast.dims).map(AffineExpr::iter).collect(),
        out: String::new(),
    };
    for r in &ast.roots {
        p.node(r, 0);
    }
    p.out
}
