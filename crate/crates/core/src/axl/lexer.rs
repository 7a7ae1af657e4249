use super::ast::Span;
use super::AxlError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Param,
    Statement,
    Codegen,
    With,
    Apply,
    And,
    Ident(String),
    Int(i64),
    Hash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Define,
    Compose,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Param => "`param`".into(),
            Tok::Statement => "`statement`".into(),
            Tok::Codegen => "`codegen`".into(),
            Tok::With => "`with`".into(),
            Tok::Apply => "`apply`".into(),
            Tok::And => "`and`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Hash => "`#`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Define => "`:=`".into(),
            Tok::Compose => "`(+)`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Split AXL source into tokens. `//` comments run to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, AxlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        let peek = |k: usize| chars.get(i + k).copied();
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && peek(1) == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| AxlError::Lex { span, msg: format!("integer `{s}` out of range") })?;
            col += i - start;
            out.push(Token { tok: Tok::Int(v), span });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match s.as_str() {
                "param" => Tok::Param,
                "statement" => Tok::Statement,
                "codegen" => Tok::Codegen,
                "with" => Tok::With,
                "apply" => Tok::Apply,
                "and" => Tok::And,
                _ => Tok::Ident(s),
            };
            out.push(Token { tok, span });
            continue;
        }
        let (tok, len) = match (c, peek(1), peek(2)) {
            ('(', Some('+'), Some(')')) => (Tok::Compose, 3),
            (':', Some('='), _) => (Tok::Define, 2),
            ('<', Some('='), _) => (Tok::Le, 2),
            ('>', Some('='), _) => (Tok::Ge, 2),
            ('=', Some('='), _) => (Tok::Eq, 2),
            ('&', Some('&'), _) => (Tok::And, 2),
            ('(', _, _) => (Tok::LParen, 1),
            (')', _, _) => (Tok::RParen, 1),
            ('{', _, _) => (Tok::LBrace, 1),
            ('}', _, _) => (Tok::RBrace, 1),
            (',', _, _) => (Tok::Comma, 1),
            (';', _, _) => (Tok::Semi, 1),
            (':', _, _) => (Tok::Colon, 1),
            ('#', _, _) => (Tok::Hash, 1),
            ('<', _, _) => (Tok::Lt, 1),
            ('>', _, _) => (Tok::Gt, 1),
            ('=', _, _) => (Tok::Eq, 1),
            ('+', _, _) => (Tok::Plus, 1),
            ('-', _, _) => (Tok::Minus, 1),
            ('*', _, _) => (Tok::Star, 1),
            _ => return Err(AxlError::Lex { span, msg: format!("illegal character `{c}`") }),
        };
        i += len;
        col += len;
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn param_decl() {
        assert_eq!(toks("param M;"), vec![Tok::Param, Tok::Ident("M".into()), Tok::Semi, Tok::Eof]);
    }

    #[test]
    fn chained_comparison() {
        assert_eq!(
            toks("1<=t<=M"),
            vec![Tok::Int(1), Tok::Le, Tok::Ident("t".into()), Tok::Le, Tok::Ident("M".into()), Tok::Eof]
        );
    }

    #[test]
    fn define_and_compose() {
        let t = toks("S2 := {t:1<=t<=M (#X(t) (+) #X(t))}");
        assert!(t.contains(&Tok::Define));
        assert!(t.contains(&Tok::Compose));
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("// header\n  param N; // trailing\n").unwrap();
        assert_eq!(t[0].tok, Tok::Param);
        assert_eq!((t[0].span.line, t[0].span.col), (2, 3));
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn illegal_char() {
        match tokenize("param $") {
            Err(AxlError::Lex { span, .. }) => assert_eq!((span.line, span.col), (1, 7)),
            other => panic!("{other:?}"),
        }
    }
}
