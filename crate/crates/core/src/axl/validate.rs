use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::AxlError;
use crate::affine::{AffineExpr, Binding, Constraint, IntegerSet};
use crate::gates::{GateCatalog, GateSignature};
use crate::transform::TransformKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedGate {
    pub sig: GateSignature,
    pub args: Vec<AffineExpr>,
}

/// Time-composition tree of a statement body; leaves index `gates`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Gate(usize),
    Compose(Vec<Body>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedStatement {
    pub name: String,
    pub domain: IntegerSet,
    pub gates: Vec<ResolvedGate>,
    pub body: Body,
}

impl ResolvedStatement {
    pub fn iterators(&self) -> &[String] {
        &self.domain.iterators
    }

    /// Parameters mentioned anywhere in the statement.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let exprs =
            self.domain.constraints.iter().map(|c| &c.expr).chain(self.gates.iter().flat_map(|g| g.args.iter()));
        for e in exprs {
            out.extend(e.params.iter().filter(|(_, c)| **c != 0).map(|(p, _)| p.clone()));
        }
        out
    }
}

/// Statement-level composition tree; leaves index `Program::statements`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Composition {
    Stmt(usize),
    Compose(Vec<Composition>),
}

impl Composition {
    pub fn statements(&self) -> Vec<usize> {
        match self {
            Composition::Stmt(s) => vec![*s],
            Composition::Compose(items) => items.iter().flat_map(|c| c.statements()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedDirective {
    pub composition: Composition,
    pub binding: Binding,
    pub transform: TransformKind,
}

/// A validated program: names resolved, gates typed, constraints affine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub params: Vec<String>,
    pub statements: Vec<ResolvedStatement>,
    pub directives: Vec<ResolvedDirective>,
}

impl Program {
    pub fn statement(&self, name: &str) -> Option<&ResolvedStatement> {
        self.statements.iter().find(|s| s.name == name)
    }
}

struct Scope<'a> {
    iterators: &'a [String],
    params: &'a BTreeSet<String>,
}

fn to_affine(e: &Expr, scope: &Scope) -> Result<AffineExpr, AxlError> {
    Ok(match e {
        Expr::Int(v, _) => AffineExpr::constant(*v),
        Expr::Var(id) => {
            if let Some(k) = scope.iterators.iter().position(|n| *n == id.name) {
                AffineExpr::iter(k)
            } else if scope.params.contains(&id.name) {
                AffineExpr::param(&id.name)
            } else {
                return Err(AxlError::UnboundIterator { span: id.span, name: id.name.clone() });
            }
        }
        Expr::Neg(a, _) => to_affine(a, scope)?.scale(-1),
        Expr::Add(a, b) => to_affine(a, scope)?.add(&to_affine(b, scope)?),
        Expr::Sub(a, b) => to_affine(a, scope)?.sub(&to_affine(b, scope)?),
        Expr::Mul(a, b) => {
            let x = to_affine(a, scope)?;
            let y = to_affine(b, scope)?;
            if x.is_constant() {
                y.scale(x.constant)
            } else if y.is_constant() {
                x.scale(y.constant)
            } else {
                return Err(AxlError::NonAffine { span: e.span() });
            }
        }
    })
}

fn to_constraint(r: &Relation, scope: &Scope) -> Result<Constraint, AxlError> {
    let l = to_affine(&r.lhs, scope)?;
    let h = to_affine(&r.rhs, scope)?;
    Ok(match r.op {
        RelOp::Lt => Constraint::ge(h.sub(&l).add_const(-1)),
        RelOp::Le => Constraint::ge(h.sub(&l)),
        RelOp::Gt => Constraint::ge(l.sub(&h).add_const(-1)),
        RelOp::Ge => Constraint::ge(l.sub(&h)),
        RelOp::Eq => Constraint::eq(l.sub(&h)),
    })
}

fn check_unique(ids: &[&Ident], what: &str) -> Result<(), AxlError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.name.as_str()) {
            return Err(AxlError::Duplicate { span: id.span, name: id.name.clone(), what: what.to_string() });
        }
    }
    Ok(())
}

fn resolve_body(
    c: &CircExpr,
    gates: &mut Vec<ResolvedGate>,
    scope: &Scope,
    cat: &GateCatalog,
) -> Result<Body, AxlError> {
    match c {
        CircExpr::Gate { name, args } => {
            let sig = cat
                .signature(&name.name)
                .map_err(|_| AxlError::UnknownGate { span: name.span, name: name.name.clone() })?;
            if sig.arity() != args.len() {
                return Err(AxlError::Arity {
                    span: name.span,
                    gate: name.name.clone(),
                    expected: sig.arity(),
                    got: args.len(),
                });
            }
            let args = args.iter().map(|a| to_affine(a, scope)).collect::<Result<_, _>>()?;
            gates.push(ResolvedGate { sig: sig.clone(), args });
            Ok(Body::Gate(gates.len() - 1))
        }
        CircExpr::Compose(items) => {
            Ok(Body::Compose(items.iter().map(|i| resolve_body(i, gates, scope, cat)).collect::<Result<_, _>>()?))
        }
    }
}

fn resolve_comp(
    c: &CompExpr,
    index: &BTreeMap<&str, usize>,
    used: &mut BTreeSet<usize>,
) -> Result<Composition, AxlError> {
    match c {
        CompExpr::Stmt(id) => {
            let &k = index
                .get(id.name.as_str())
                .ok_or_else(|| AxlError::UndefinedStatement { span: id.span, name: id.name.clone() })?;
            if !used.insert(k) {
                return Err(AxlError::RepeatedStatement { span: id.span, name: id.name.clone() });
            }
            Ok(Composition::Stmt(k))
        }
        CompExpr::Compose(items) => {
            Ok(Composition::Compose(items.iter().map(|i| resolve_comp(i, index, used)).collect::<Result<_, _>>()?))
        }
    }
}

/// Resolve names, type gate calls and lower domains to integer sets.
pub fn validate(ast: &SourceProgram, catalog: &GateCatalog) -> Result<Program, AxlError> {
    check_unique(&ast.params.iter().collect::<Vec<_>>(), "parameter")?;
    check_unique(&ast.declared.iter().collect::<Vec<_>>(), "statement")?;
    check_unique(&ast.statements.iter().map(|s| &s.name).collect::<Vec<_>>(), "statement definition")?;
    let params: BTreeSet<String> = ast.params.iter().map(|p| p.name.clone()).collect();
    let declared: BTreeSet<&str> = ast.declared.iter().map(|d| d.name.as_str()).collect();

    let mut statements = Vec::new();
    for s in &ast.statements {
        if !declared.contains(s.name.name.as_str()) {
            return Err(AxlError::UndeclaredStatement { span: s.name.span, name: s.name.name.clone() });
        }
        check_unique(&s.domain.iterators.iter().collect::<Vec<_>>(), "iterator")?;
        for it in &s.domain.iterators {
            if params.contains(&it.name) {
                return Err(AxlError::Duplicate {
                    span: it.span,
                    name: it.name.clone(),
                    what: "iterator shadowing a parameter".into(),
                });
            }
        }
        let iterators: Vec<String> = s.domain.iterators.iter().map(|i| i.name.clone()).collect();
        let scope = Scope { iterators: &iterators, params: &params };
        let constraints = s.domain.constraints.iter().map(|r| to_constraint(r, &scope)).collect::<Result<_, _>>()?;
        let mut gates = Vec::new();
        let body = resolve_body(&s.body, &mut gates, &scope, catalog)?;
        statements.push(ResolvedStatement {
            name: s.name.name.clone(),
            domain: IntegerSet::new(iterators, constraints),
            gates,
            body,
        });
    }

    let index: BTreeMap<&str, usize> = statements.iter().enumerate().map(|(k, s)| (s.name.as_str(), k)).collect();
    let mut directives = Vec::new();
    for d in &ast.directives {
        let mut used = BTreeSet::new();
        let composition = resolve_comp(&d.composition, &index, &mut used)?;
        check_unique(&d.bindings.iter().map(|b| &b.0).collect::<Vec<_>>(), "binding")?;
        let mut binding = Binding::new();
        for (id, v) in &d.bindings {
            if !params.contains(&id.name) {
                return Err(AxlError::UnknownParam { span: id.span, name: id.name.clone() });
            }
            if *v < 0 {
                return Err(AxlError::NegativeBinding { span: id.span, name: id.name.clone() });
            }
            binding.set(&id.name, *v);
        }
        for &k in &used {
            for p in statements[k].params() {
                if binding.get(&p).is_none() {
                    return Err(AxlError::UnboundParam { span: d.span, name: p });
                }
            }
        }
        directives.push(ResolvedDirective {
            composition,
            binding,
            transform: d.transform.map(|t| t.0).unwrap_or(TransformKind::Base),
        });
    }
    Ok(Program { params: ast.params.iter().map(|p| p.name.clone()).collect(), statements, directives })
}
