//! AXL front end: tokenizer, parser, validator and pretty printer.
//!
//! ```text
//! param N;
//! statement S;
//! S := {i: 0<=i<N ( #CNOT(i, i+1) (+) #X(i) )};
//! codegen { S } with { N=4 } apply { plutomax };
//! ```

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod validate;

use thiserror::Error;

pub use ast::{SourceProgram, Span};
pub use lexer::tokenize;
pub use parser::parse;
pub use printer::print_program;
pub use validate::{validate, Body, Composition, Program, ResolvedDirective, ResolvedGate, ResolvedStatement};

use crate::gates::GateCatalog;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AxlError {
    #[error("{span}: {msg}")]
    Lex { span: Span, msg: String },
    #[error("{span}: expected {expected}, found {found}")]
    Syntax { span: Span, expected: String, found: String },
    #[error("{span}: unknown gate `{name}`")]
    UnknownGate { span: Span, name: String },
    #[error("{span}: gate `{gate}` takes {expected} arguments, got {got}")]
    Arity { span: Span, gate: String, expected: usize, got: usize },
    #[error("{span}: parameter `{name}` is not bound")]
    UnboundParam { span: Span, name: String },
    #[error("{span}: `{name}` is not a parameter")]
    UnknownParam { span: Span, name: String },
    #[error("{span}: binding for `{name}` is negative")]
    NegativeBinding { span: Span, name: String },
    #[error("{span}: `{name}` is not an iterator of this statement or a parameter")]
    UnboundIterator { span: Span, name: String },
    #[error("{span}: product of two non-constant terms is not affine")]
    NonAffine { span: Span },
    #[error("{span}: duplicate {what} `{name}`")]
    Duplicate { span: Span, name: String, what: String },
    #[error("{span}: statement `{name}` is defined but not declared")]
    UndeclaredStatement { span: Span, name: String },
    #[error("{span}: statement `{name}` has no definition")]
    UndefinedStatement { span: Span, name: String },
    #[error("{span}: statement `{name}` appears twice in one composition")]
    RepeatedStatement { span: Span, name: String },
}

/// Tokenize and parse.
pub fn parse_source(text: &str) -> Result<SourceProgram, AxlError> {
    parse(&tokenize(text)?)
}

/// Tokenize, parse and validate against `catalog`.
pub fn load(text: &str, catalog: &GateCatalog) -> Result<Program, AxlError> {
    validate(&parse_source(text)?, catalog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::TransformKind;

    const PARITY: &str = "param M;
statement S1, S2, S3;
S1 := {t:1<=t<=M ( #X(t) (+) #CNOT(t, 0) )};
S2 := {t:1<=t<=M ( #X(t) )};
S3 := {t:1<=t<=M ( #CNOT(t, 0) )};
codegen {S1}  with {M=8} apply {plutomax};
codegen {S2(+)S3} with {M=8} apply {plutomin};
";

    #[test]
    fn parity_shape() {
        let ast = parse_source(PARITY).unwrap();
        assert_eq!(ast.params.len(), 1);
        assert_eq!(ast.statements.len(), 3);
        assert_eq!(ast.directives.len(), 2);
        assert_eq!(ast.statements[0].domain.constraints.len(), 2);
        let p = validate(&ast, &GateCatalog::standard()).unwrap();
        assert_eq!(p.directives[0].transform, TransformKind::PlutoMax);
        assert_eq!(p.directives[1].transform, TransformKind::PlutoMin);
        assert_eq!(p.directives[1].composition.statements(), vec![1, 2]);
    }

    #[test]
    fn empty_program() {
        let ast = parse_source("").unwrap();
        assert_eq!(ast, SourceProgram::default());
        assert!(validate(&ast, &GateCatalog::standard()).unwrap().directives.is_empty());
    }

    #[test]
    fn open_body_and_comma_constraints() {
        let src = "param T; statement S1;
S1 := { t,i : 0 <= t, t < T, 0 <= i, i < 3 (
  #CY(t,t+2) (+) #CZ(t+i,t+i+3) };
codegen {S1} with {T=2};";
        let p = load(src, &GateCatalog::standard()).unwrap();
        assert_eq!(p.statements[0].gates.len(), 2);
        assert_eq!(p.statements[0].domain.constraints.len(), 4);
        assert_eq!(p.directives[0].transform, TransformKind::Base);
    }

    #[test]
    fn arity_error() {
        let src = "statement S; S := {i: 0<=i<3 (#CNOT(i, i+1, i+2))};";
        assert!(matches!(load(src, &GateCatalog::standard()), Err(AxlError::Arity { expected: 2, got: 3, .. })));
        let ok = "statement S; S := {i: 0<=i<3 (#CNOT(i, i+1))};";
        assert!(load(ok, &GateCatalog::standard()).is_ok());
    }

    #[test]
    fn unbound_iterator() {
        let src = "param N; statement S; S := {t: 0<=t<N (#X(j))};";
        match load(src, &GateCatalog::standard()) {
            Err(AxlError::UnboundIterator { name, span }) => {
                assert_eq!(name, "j");
                assert_eq!((span.line, span.col), (1, 43));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_validation_errors() {
        let cat = GateCatalog::standard();
        let unknown = "statement S; S := {i: 0<=i<3 (#FOO(i))};";
        assert!(matches!(load(unknown, &cat), Err(AxlError::UnknownGate { .. })));
        let unbound = "param N; statement S; S := {i: 0<=i<N (#X(i))}; codegen {S} with {};";
        assert!(matches!(load(unbound, &cat), Err(AxlError::UnboundParam { .. })));
        let nonaff = "param N; statement S; S := {i: 0<=i<N (#X(i*i))};";
        assert!(matches!(load(nonaff, &cat), Err(AxlError::NonAffine { .. })));
        let twice = "statement S; S := {i: 0<=i<2 (#X(i))}; codegen {S (+) S} with {};";
        assert!(matches!(load(twice, &cat), Err(AxlError::RepeatedStatement { .. })));
        let bad = "statement S; S := {i: 0<=i<2 (#X(i))}; codegen {S} with {} apply {tile};";
        assert!(matches!(load(bad, &cat), Err(AxlError::Syntax { .. })));
        let undecl = "S := {i: 0<=i<2 (#X(i))};";
        assert!(matches!(load(undecl, &cat), Err(AxlError::UndeclaredStatement { .. })));
        let scaled = "param N; statement S; S := {i: 0<=i<N (#X(2*i+N*3))}; codegen {S} with {N=1};";
        assert!(load(scaled, &cat).is_ok());
    }

    #[test]
    fn syntax_error_position() {
        match parse_source("param M\nstatement S;") {
            Err(AxlError::Syntax { span, expected, .. }) => {
                assert_eq!((span.line, span.col), (2, 1));
                assert_eq!(expected, "`;`");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nested_groups_round_trip() {
        let src = "param N; statement A, B;
A := {i: (0)<=i, i+1<=N ( (#X(i) (+) #H(i)) (+) #Z(i) )};
B := {i: 0<=i<N ( #CNOT(-i+N-1, 2*(i+1)) )};
codegen { (A (+) B) } with { N=3 } apply { feautrier };";
        let ast = parse_source(src).unwrap();
        let printed = print_program(&ast);
        assert_eq!(parse_source(&printed).unwrap(), ast);
    }
}
