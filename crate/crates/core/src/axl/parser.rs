use super::ast::*;
use super::lexer::{Tok, Token};
use super::AxlError;
use crate::transform::TransformKind;

pub fn parse(tokens: &[Token]) -> Result<SourceProgram, AxlError> {
    let mut p = Parser { toks: tokens, pos: 0 };
    p.program()
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, k: usize) -> &'a Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> &'a Token {
        let t = self.peek();
        if self.pos < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, AxlError> {
        let t = self.peek();
        Err(AxlError::Syntax { span: t.span, expected: expected.to_string(), found: t.tok.describe() })
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, AxlError> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.describe())
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<Ident, AxlError> {
        let t = self.peek();
        if let Tok::Ident(name) = &t.tok {
            self.pos += 1;
            Ok(Ident { name: name.clone(), span: t.span })
        } else {
            self.error("identifier")
        }
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, AxlError> {
        let mut v = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            v.push(self.ident()?);
        }
        Ok(v)
    }

    fn program(&mut self) -> Result<SourceProgram, AxlError> {
        let mut prog = SourceProgram::default();
        loop {
            match &self.peek().tok {
                Tok::Eof => return Ok(prog),
                Tok::Param => {
                    self.bump();
                    prog.params.extend(self.ident_list()?);
                    self.expect(Tok::Semi)?;
                }
                Tok::Statement => {
                    self.bump();
                    prog.declared.extend(self.ident_list()?);
                    self.expect(Tok::Semi)?;
                }
                Tok::Codegen => prog.directives.push(self.directive()?),
                Tok::Ident(_) => prog.statements.push(self.definition()?),
                _ => return self.error("`param`, `statement`, `codegen` or a statement definition"),
            }
        }
    }

    fn definition(&mut self) -> Result<StatementDecl, AxlError> {
        let name = self.ident()?;
        self.expect(Tok::Define)?;
        self.expect(Tok::LBrace)?;
        let iterators = if matches!(self.peek().tok, Tok::Colon) { vec![] } else { self.ident_list()? };
        self.expect(Tok::Colon)?;
        let mut constraints = Vec::new();
        if !self.at_body_start() {
            loop {
                constraints.extend(self.relation_chain()?);
                if self.eat(&Tok::Comma) || self.eat(&Tok::And) {
                    continue;
                }
                break;
            }
        }
        self.expect(Tok::LParen)?;
        let body = self.circ()?;
        self.eat(&Tok::RParen);
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Semi)?;
        Ok(StatementDecl { name, domain: Domain { iterators, constraints }, body })
    }

    fn at_body_start(&self) -> bool {
        matches!(self.peek().tok, Tok::LParen) && !self.paren_is_expr()
    }

    /// `( (` could open a nested body group or a parenthesized expression;
    /// look for a `#` before the matching close.
    fn paren_is_expr(&self) -> bool {
        if matches!(self.peek_at(1), Tok::Hash) {
            return false;
        }
        let mut depth = 0i32;
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return true;
                    }
                }
                Tok::Hash | Tok::Compose => return false,
                Tok::Eof => return true,
                _ => {}
            }
            k += 1;
        }
    }

    fn relop(&self) -> Option<RelOp> {
        Some(match self.peek().tok {
            Tok::Lt => RelOp::Lt,
            Tok::Le => RelOp::Le,
            Tok::Gt => RelOp::Gt,
            Tok::Ge => RelOp::Ge,
            Tok::Eq => RelOp::Eq,
            _ => return None,
        })
    }

    fn relation_chain(&mut self) -> Result<Vec<Relation>, AxlError> {
        let mut lhs = self.expr()?;
        let mut out = Vec::new();
        while let Some(op) = self.relop() {
            self.bump();
            let rhs = self.expr()?;
            out.push(Relation { lhs: lhs.clone(), op, rhs: rhs.clone() });
            lhs = rhs;
        }
        if out.is_empty() {
            return self.error("comparison operator");
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr, AxlError> {
        let mut e = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, AxlError> {
        let mut e = self.unary()?;
        while self.eat(&Tok::Star) {
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, AxlError> {
        let t = self.peek();
        match &t.tok {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?), t.span))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(*v, t.span))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => self.error("expression"),
        }
    }

    fn circ(&mut self) -> Result<CircExpr, AxlError> {
        let mut items = vec![self.circ_atom()?];
        while self.eat(&Tok::Compose) {
            items.push(self.circ_atom()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { CircExpr::Compose(items) })
    }

    fn circ_atom(&mut self) -> Result<CircExpr, AxlError> {
        match self.peek().tok {
            Tok::Hash => {
                self.bump();
                let name = self.ident()?;
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                if !matches!(self.peek().tok, Tok::RParen) {
                    args.push(self.expr()?);
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr()?);
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(CircExpr::Gate { name, args })
            }
            Tok::LParen => {
                self.bump();
                let c = self.circ()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            _ => self.error("gate call `#NAME(...)` or `(`"),
        }
    }

    fn comp(&mut self) -> Result<CompExpr, AxlError> {
        let mut items = vec![self.comp_atom()?];
        while self.eat(&Tok::Compose) {
            items.push(self.comp_atom()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { CompExpr::Compose(items) })
    }

    fn comp_atom(&mut self) -> Result<CompExpr, AxlError> {
        if self.eat(&Tok::LParen) {
            let c = self.comp()?;
            self.expect(Tok::RParen)?;
            Ok(c)
        } else {
            Ok(CompExpr::Stmt(self.ident()?))
        }
    }

    fn directive(&mut self) -> Result<CodegenDirective, AxlError> {
        let span = self.expect(Tok::Codegen)?;
        self.expect(Tok::LBrace)?;
        let composition = self.comp()?;
        self.expect(Tok::RBrace)?;
        self.expect(Tok::With)?;
        self.expect(Tok::LBrace)?;
        let mut bindings = Vec::new();
        if !matches!(self.peek().tok, Tok::RBrace) {
            loop {
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let neg = self.eat(&Tok::Minus);
                let v = match self.peek().tok {
                    Tok::Int(v) => {
                        self.bump();
                        v
                    }
                    _ => return self.error("integer"),
                };
                bindings.push((name, if neg { -v } else { v }));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        let mut transform = None;
        if self.eat(&Tok::Apply) {
            self.expect(Tok::LBrace)?;
            let id = self.ident()?;
            let kind = TransformKind::from_name(&id.name).ok_or_else(|| AxlError::Syntax {
                span: id.span,
                expected: "one of base, feautrier, plutomin, plutomax".into(),
                found: format!("identifier `{}`", id.name),
            })?;
            transform = Some((kind, id.span));
            self.expect(Tok::RBrace)?;
        }
        self.expect(Tok::Semi)?;
        Ok(CodegenDirective { composition, bindings, transform, span })
    }
}
