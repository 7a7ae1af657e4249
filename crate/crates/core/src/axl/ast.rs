use std::fmt;

use crate::transform::TransformKind;

/// Source position. Spans never take part in equality so that ASTs parsed
/// from differently formatted text compare equal.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64, Span),
    Var(Ident),
    Neg(Box<Expr>, Span),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Int(_, s) | Expr::Neg(_, s) => *s,
            Expr::Var(id) => id.span,
            Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) => a.span(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "=",
        }
    }
}

/// A single binary relation; chains such as `0<=i<N` are expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Expr,
    pub op: RelOp,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub iterators: Vec<Ident>,
    pub constraints: Vec<Relation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircExpr {
    Gate { name: Ident, args: Vec<Expr> },
    Compose(Vec<CircExpr>),
}

impl CircExpr {
    /// Gate calls in time order.
    pub fn gates(&self) -> Vec<(&Ident, &[Expr])> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<(&'a Ident, &'a [Expr])>) {
        match self {
            CircExpr::Gate { name, args } => out.push((name, args)),
            CircExpr::Compose(items) => items.iter().for_each(|c| c.collect(out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatementDecl {
    pub name: Ident,
    pub domain: Domain,
    pub body: CircExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompExpr {
    Stmt(Ident),
    Compose(Vec<CompExpr>),
}

impl CompExpr {
    pub fn statements(&self) -> Vec<&Ident> {
        match self {
            CompExpr::Stmt(id) => vec![id],
            CompExpr::Compose(items) => items.iter().flat_map(|c| c.statements()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodegenDirective {
    pub composition: CompExpr,
    pub bindings: Vec<(Ident, i64)>,
    pub transform: Option<(TransformKind, Span)>,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceProgram {
    pub params: Vec<Ident>,
    pub declared: Vec<Ident>,
    pub statements: Vec<StatementDecl>,
    pub directives: Vec<CodegenDirective>,
}
