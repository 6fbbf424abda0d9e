//! Recursive-descent parser for MET.
//!
//! ```text
//! expr0   ::= let x = expr0 in expr0 | let rec f x = expr0 in expr0
//!           | fun x -> expr0 | match expr0 with [|] pat -> expr0 { | pat -> expr0 }
//!           | expr1
//! expr1   ::= expr2 [ = expr2 ]
//! expr2   ::= expr3 { + expr3 }
//! expr3   ::= expr4 { * expr4 }
//! expr4   ::= unary { atom }
//! unary   ::= fst unary | snd unary | atom
//! atom    ::= int | ident | Tag | Tag(expr0, ..) | prim(expr0, ..)
//!           | ( expr0 ) | ( expr0 , expr0 )
//! pat     ::= _ | ident | int | Tag | Tag(pat, ..) | ( pat ) | ( pat , pat )
//! ```
//!
//! `prim` is one of `eta aadd amul aeq ajoin fne0 feq0`. A constructor's
//! argument list must follow the tag without whitespace. Comments are
//! `(* ... *)` and nest.

use thiserror::Error;

use super::{Expr, Pattern, PrimOp, Signature};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown constructor `{tag}`")]
    UnknownConstructor { line: usize, column: usize, tag: String },
    #[error("{line}:{column}: constructor `{tag}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        line: usize,
        column: usize,
        tag: String,
        expected: usize,
        found: usize,
    },
}

pub fn parse_met<I: Scalar>(text: &str) -> Result<Expr<I>, ParseError> {
    parse_met_with(text, &Signature::default())
}

pub fn parse_met_with<I: Scalar>(text: &str, sig: &Signature) -> Result<Expr<I>, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, sig };
    let e = p.expr0()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        _ => Err(p.error("unexpected token after expression")),
    }
}

const KEYWORDS: [&str; 8] = ["let", "rec", "in", "fun", "match", "with", "fst", "snd"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Tag(String),
    Kw(&'static str),
    Prim(PrimOp),
    /// `(`; `true` when glued to the preceding token.
    LParen(bool),
    RParen,
    Comma,
    Bar,
    Arrow,
    Equals,
    Plus,
    Star,
    Wild,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut out = Vec::new();
    let mut glued = false;
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            glued = false;
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            let (sl, sc) = (line, col);
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(ParseError::Syntax {
                        line: sl,
                        column: sc,
                        message: "unterminated comment".into(),
                    });
                }
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, 2);
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, 2);
                    if depth == 0 {
                        break;
                    }
                } else {
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
            glued = false;
            continue;
        }
        let (tl, tc) = (line, col);
        let (tok, len) = if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit))
        {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            (Tok::Int(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let tok = if word == "_" {
                Tok::Wild
            } else if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Kw(kw)
            } else if let Some(op) = PrimOp::from_keyword(&word) {
                Tok::Prim(op)
            } else if c.is_ascii_uppercase() {
                Tok::Tag(word)
            } else {
                Tok::Ident(word)
            };
            (tok, j - i)
        } else {
            match (c, chars.get(i + 1)) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('(', _) => (Tok::LParen(glued), 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('|', _) => (Tok::Bar, 1),
                ('=', _) => (Tok::Equals, 1),
                ('+', _) => (Tok::Plus, 1),
                ('*', _) => (Tok::Star, 1),
                _ => {
                    return Err(ParseError::Syntax {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        out.push(Token { tok, line: tl, column: tc });
        advance(&mut i, &mut line, &mut col, len);
        glued = true;
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        ParseError::Syntax { line, column, message: format!("{} (found {found})", message.into()) }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let matches = match (&tok, self.peek()) {
            (Tok::LParen(_), Tok::LParen(_)) => true,
            (a, b) => a == b,
        };
        if matches {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn check_tag(&self, tag: &str, found: usize, at: (usize, usize)) -> Result<(), ParseError> {
        let (line, column) = at;
        match self.sig.arity(tag) {
            None => Err(ParseError::UnknownConstructor { line, column, tag: tag.to_string() }),
            Some(expected) if expected != found => Err(ParseError::ArityMismatch {
                line,
                column,
                tag: tag.to_string(),
                expected,
                found,
            }),
            Some(_) => Ok(()),
        }
    }

    fn expr0<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        stacker::maybe_grow(64 * 1024, 1024 * 1024, || self.expr0_inner())
    }

    fn expr0_inner<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        match self.peek() {
            Tok::Kw("let") => {
                self.bump();
                if *self.peek() == Tok::Kw("rec") {
                    self.bump();
                    let name = self.ident()?;
                    let param = self.ident()?;
                    self.expect(Tok::Equals, "`=`")?;
                    let body = self.expr0()?;
                    self.expect(Tok::Kw("in"), "`in`")?;
                    let cont = self.expr0()?;
                    Ok(Expr::LetRec { name, param, body: body.into(), cont: Box::new(cont) })
                } else {
                    let x = self.ident()?;
                    self.expect(Tok::Equals, "`=`")?;
                    let bound = self.expr0()?;
                    self.expect(Tok::Kw("in"), "`in`")?;
                    let body = self.expr0()?;
                    Ok(Expr::let_(x, bound, body))
                }
            }
            Tok::Kw("fun") => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Arrow, "`->`")?;
                Ok(Expr::lambda(x, self.expr0()?))
            }
            Tok::Kw("match") => {
                self.bump();
                let scrutinee = self.expr0()?;
                self.expect(Tok::Kw("with"), "`with`")?;
                let mut branches = Vec::new();
                let mut first = true;
                loop {
                    if *self.peek() == Tok::Bar {
                        self.bump();
                    } else if !first {
                        break;
                    }
                    first = false;
                    let at = self.here();
                    let p = self.pattern::<I>()?;
                    if !p.is_linear() {
                        let (line, column) = at;
                        return Err(ParseError::Syntax {
                            line,
                            column,
                            message: "pattern binds a variable twice".into(),
                        });
                    }
                    self.expect(Tok::Arrow, "`->`")?;
                    branches.push((p, self.expr0()?));
                }
                Ok(Expr::matches(scrutinee, branches))
            }
            _ => self.expr1(),
        }
    }

    fn expr1<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        let lhs = self.expr2()?;
        if *self.peek() != Tok::Equals {
            return Ok(lhs);
        }
        self.bump();
        let rhs = self.expr2()?;
        if *self.peek() == Tok::Equals {
            return Err(self.error("`=` is non-associative; add parentheses"));
        }
        Ok(Expr::prim(PrimOp::Eq, vec![lhs, rhs]))
    }

    fn expr2<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        let mut e = self.expr3()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            e = Expr::prim(PrimOp::Add, vec![e, self.expr3()?]);
        }
        Ok(e)
    }

    fn expr3<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        let mut e = self.expr4()?;
        while *self.peek() == Tok::Star {
            self.bump();
            e = Expr::prim(PrimOp::Mul, vec![e, self.expr4()?]);
        }
        Ok(e)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_) | Tok::Ident(_) | Tok::Tag(_) | Tok::Prim(_) | Tok::LParen(_)
        )
    }

    fn expr4<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        let mut e = self.unary()?;
        while self.starts_atom() {
            e = Expr::app(e, self.atom()?);
        }
        Ok(e)
    }

    fn unary<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        match self.peek() {
            Tok::Kw("fst") => {
                self.bump();
                Ok(Expr::fst(self.unary()?))
            }
            Tok::Kw("snd") => {
                self.bump();
                Ok(Expr::snd(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn int<I: Scalar>(&self, text: &str) -> Result<I, ParseError> {
        text.parse::<I>()
            .map_err(|_| self.error(format!("integer literal `{text}` out of range")))
    }

    fn atom<I: Scalar>(&mut self) -> Result<Expr<I>, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Int(text) => {
                let n = self.int(&text)?;
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(Expr::Var(x))
            }
            Tok::Tag(tag) => {
                self.bump();
                let args = if *self.peek() == Tok::LParen(true) {
                    self.args(|p| p.expr0())?
                } else {
                    Vec::new()
                };
                self.check_tag(&tag, args.len(), at)?;
                Ok(Expr::Construct(tag, args))
            }
            Tok::Prim(op) => {
                self.bump();
                if !matches!(self.peek(), Tok::LParen(_)) {
                    return Err(self.error(format!("expected `(` after `{}`", op.keyword().unwrap_or(""))));
                }
                let args = self.args(|p| p.expr0())?;
                if args.len() != op.arity() {
                    let (line, column) = at;
                    return Err(ParseError::Syntax {
                        line,
                        column,
                        message: format!(
                            "`{}` expects {} argument(s), got {}",
                            op.keyword().unwrap_or(""),
                            op.arity(),
                            args.len()
                        ),
                    });
                }
                Ok(Expr::prim(op, args))
            }
            Tok::LParen(_) => {
                self.bump();
                let a = self.expr0()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let b = self.expr0()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::tuple(a, b))
                } else {
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    Ok(a)
                }
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    fn args<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        self.expect(Tok::LParen(true), "`(`")?;
        let mut out = vec![item(self)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(item(self)?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn pattern<I: Scalar>(&mut self) -> Result<Pattern<I>, ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Wild => {
                self.bump();
                Ok(Pattern::Wild)
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(Pattern::Var(x))
            }
            Tok::Int(text) => {
                let n = self.int(&text)?;
                self.bump();
                Ok(Pattern::Int(n))
            }
            Tok::Tag(tag) => {
                self.bump();
                let ps = if *self.peek() == Tok::LParen(true) {
                    self.args(|p| p.pattern())?
                } else {
                    Vec::new()
                };
                self.check_tag(&tag, ps.len(), at)?;
                Ok(Pattern::Construct(tag, ps))
            }
            Tok::LParen(_) => {
                self.bump();
                let a = self.pattern()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let b = self.pattern()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Pattern::tuple(a, b))
                } else {
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    Ok(a)
                }
            }
            _ => Err(self.error("expected a pattern")),
        }
    }
}
