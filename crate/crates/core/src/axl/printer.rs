use super::ast::*;

pub fn print_expr(e: &Expr) -> String {
    fn wrap(e: &Expr, when: bool) -> String {
        if when {
            format!("({})", print_expr(e))
        } else {
            print_expr(e)
        }
    }
    let additive = |e: &Expr| matches!(e, Expr::Add(..) | Expr::Sub(..));
    match e {
        Expr::Int(v, _) => v.to_string(),
        Expr::Var(id) => id.name.clone(),
        Expr::Neg(a, _) => format!("-{}", wrap(a, !matches!(**a, Expr::Int(..) | Expr::Var(_) | Expr::Neg(..)))),
        Expr::Add(a, b) => format!("{}+{}", print_expr(a), wrap(b, additive(b))),
        Expr::Sub(a, b) => format!("{}-{}", print_expr(a), wrap(b, additive(b))),
        Expr::Mul(a, b) => format!("{}*{}", wrap(a, additive(a)), wrap(b, additive(b) || matches!(**b, Expr::Mul(..)))),
    }
}

fn print_circ(c: &CircExpr, nested: bool) -> String {
    match c {
        CircExpr::Gate { name, args } => {
            let a: Vec<String> = args.iter().map(print_expr).collect();
            format!("#{}({})", name.name, a.join(", "))
        }
        CircExpr::Compose(items) => {
            let s: Vec<String> = items.iter().map(|i| print_circ(i, true)).collect();
            let body = s.join(" (+) ");
            if nested {
                format!("({body})")
            } else {
                body
            }
        }
    }
}

fn print_comp(c: &CompExpr, nested: bool) -> String {
    match c {
        CompExpr::Stmt(id) => id.name.clone(),
        CompExpr::Compose(items) => {
            let s: Vec<String> = items.iter().map(|i| print_comp(i, true)).collect();
            let body = s.join(" (+) ");
            if nested {
                format!("({body})")
            } else {
                body
            }
        }
    }
}

/// Render a program as AXL source that parses back to an equal AST.
pub fn print_program(p: &SourceProgram) -> String {
    let mut out = String::new();
    let names = |v: &[Ident]| v.iter().map(|i| i.name.clone()).collect::<Vec<_>>().join(", ");
    if !p.params.is_empty() {
        out.push_str(&format!("param {};\n", names(&p.params)));
    }
    if !p.declared.is_empty() {
        out.push_str(&format!("statement {};\n", names(&p.declared)));
    }
    for s in &p.statements {
        let cons: Vec<String> = s
            .domain
            .constraints
            .iter()
            .map(|r| format!("{}{}{}", print_expr(&r.lhs), r.op.symbol(), print_expr(&r.rhs)))
            .collect();
        out.push_str(&format!(
            "{} := {{{}: {} (\n  {} )}};\n",
            s.name.name,
            names(&s.domain.iterators),
            cons.join(", "),
            print_circ(&s.body, false)
        ));
    }
    for d in &p.directives {
        let b: Vec<String> = d.bindings.iter().map(|(k, v)| format!("{}={}", k.name, v)).collect();
        out.push_str(&format!("codegen {{ {} }} with {{ {} }}", print_comp(&d.composition, false), b.join(", ")));
        if let Some((t, _)) = d.transform {
            out.push_str(&format!(" apply {{ {} }}", t.name()));
        }
        out.push_str(";\n");
    }
    out
}
