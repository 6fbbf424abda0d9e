//! SRC: loop-free expressions over a single input variable `x`, with integers
//! and nested pairs as values.
//!
//! Concrete syntax is s-expressions: `x`, integer literals, and the forms
//! `(+ e e) (* e e) (= e e) (pair e e) (fst e) (snd e) (if e e e)`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::met::Value;
use crate::scalar::Scalar;

/// Constructor tags of the SRC syntax tree as embedded in MET, with arities.
pub const SRC_TAGS: [(&str, usize); 9] = [
    ("X", 0),
    ("Num", 1),
    ("Add", 2),
    ("Mul", 2),
    ("Eq", 2),
    ("Pair", 2),
    ("Fst", 1),
    ("Snd", 1),
    ("If", 3),
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SrcExpr<I> {
    X,
    Num(I),
    Add(Box<SrcExpr<I>>, Box<SrcExpr<I>>),
    Mul(Box<SrcExpr<I>>, Box<SrcExpr<I>>),
    Eq(Box<SrcExpr<I>>, Box<SrcExpr<I>>),
    Pair(Box<SrcExpr<I>>, Box<SrcExpr<I>>),
    Fst(Box<SrcExpr<I>>),
    Snd(Box<SrcExpr<I>>),
    If(Box<SrcExpr<I>>, Box<SrcExpr<I>>, Box<SrcExpr<I>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SrcValue<I> {
    Int(I),
    Pair(Box<SrcValue<I>>, Box<SrcValue<I>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stuck: {0}")]
pub struct SrcStuck(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct SrcParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not an embedded SRC {what}: {found}")]
pub struct UnembedError {
    pub what: &'static str,
    pub found: String,
}

impl<I> SrcExpr<I> {
    pub fn add(a: Self, b: Self) -> Self {
        SrcExpr::Add(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Self, b: Self) -> Self {
        SrcExpr::Mul(Box::new(a), Box::new(b))
    }
    pub fn eq(a: Self, b: Self) -> Self {
        SrcExpr::Eq(Box::new(a), Box::new(b))
    }
    pub fn pair(a: Self, b: Self) -> Self {
        SrcExpr::Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(a: Self) -> Self {
        SrcExpr::Fst(Box::new(a))
    }
    pub fn snd(a: Self) -> Self {
        SrcExpr::Snd(Box::new(a))
    }
    pub fn if_(c: Self, t: Self, e: Self) -> Self {
        SrcExpr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn size(&self) -> usize {
        match self {
            SrcExpr::X | SrcExpr::Num(_) => 1,
            SrcExpr::Fst(a) | SrcExpr::Snd(a) => 1 + a.size(),
            SrcExpr::Add(a, b) | SrcExpr::Mul(a, b) | SrcExpr::Eq(a, b) | SrcExpr::Pair(a, b) => {
                1 + a.size() + b.size()
            }
            SrcExpr::If(a, b, c) => 1 + a.size() + b.size() + c.size(),
        }
    }
}

impl<I> SrcValue<I> {
    pub fn pair(a: Self, b: Self) -> Self {
        SrcValue::Pair(Box::new(a), Box::new(b))
    }
}

impl<I: Scalar> SrcValue<I> {
    pub fn int(n: i64) -> Self {
        SrcValue::Int(I::from_i64_wrapping(n))
    }

    pub fn shape(&self) -> Shape {
        match self {
            SrcValue::Int(_) => Shape::Int,
            SrcValue::Pair(a, b) => Shape::pair(a.shape(), b.shape()),
        }
    }
}

fn int_of<I: Scalar>(v: SrcValue<I>, what: &str) -> Result<I, SrcStuck> {
    match v {
        SrcValue::Int(n) => Ok(n),
        SrcValue::Pair(..) => Err(SrcStuck(format!("{what} applied to a pair"))),
    }
}

fn pair_of<I: Scalar>(v: SrcValue<I>, what: &str) -> Result<(SrcValue<I>, SrcValue<I>), SrcStuck> {
    match v {
        SrcValue::Pair(a, b) => Ok((*a, *b)),
        SrcValue::Int(_) => Err(SrcStuck(format!("{what} applied to an integer"))),
    }
}

/// Concrete SRC semantics. The environment is the single input value.
pub fn eval_src<I: Scalar>(e: &SrcExpr<I>, input: &SrcValue<I>) -> Result<SrcValue<I>, SrcStuck> {
    Ok(match e {
        SrcExpr::X => input.clone(),
        SrcExpr::Num(n) => SrcValue::Int(n.clone()),
        SrcExpr::Add(a, b) => {
            let x = int_of(eval_src(a, input)?, "+")?;
            let y = int_of(eval_src(b, input)?, "+")?;
            SrcValue::Int(x.lang_add(&y))
        }
        SrcExpr::Mul(a, b) => {
            let x = int_of(eval_src(a, input)?, "*")?;
            let y = int_of(eval_src(b, input)?, "*")?;
            SrcValue::Int(x.lang_mul(&y))
        }
        SrcExpr::Eq(a, b) => {
            let x = int_of(eval_src(a, input)?, "=")?;
            let y = int_of(eval_src(b, input)?, "=")?;
            SrcValue::Int(if x == y { I::one_value() } else { I::zero_value() })
        }
        SrcExpr::Pair(a, b) => SrcValue::pair(eval_src(a, input)?, eval_src(b, input)?),
        SrcExpr::Fst(a) => pair_of(eval_src(a, input)?, "fst")?.0,
        SrcExpr::Snd(a) => pair_of(eval_src(a, input)?, "snd")?.1,
        SrcExpr::If(c, t, f) => {
            let p = int_of(eval_src(c, input)?, "if")?;
            if p.is_zero() {
                eval_src(f, input)?
            } else {
                eval_src(t, input)?
            }
        }
    })
}

// --- embedding into MET ----------------------------------------------------

/// Embeds an SRC program as a MET constructor tree.
pub fn embed_src_expr<I: Scalar>(e: &SrcExpr<I>) -> Value<I> {
    let c = |tag: &str, args: Vec<Value<I>>| Value::construct(tag, args);
    match e {
        SrcExpr::X => c("X", vec![]),
        SrcExpr::Num(n) => c("Num", vec![Value::Int(n.clone())]),
        SrcExpr::Add(a, b) => c("Add", vec![embed_src_expr(a), embed_src_expr(b)]),
        SrcExpr::Mul(a, b) => c("Mul", vec![embed_src_expr(a), embed_src_expr(b)]),
        SrcExpr::Eq(a, b) => c("Eq", vec![embed_src_expr(a), embed_src_expr(b)]),
        SrcExpr::Pair(a, b) => c("Pair", vec![embed_src_expr(a), embed_src_expr(b)]),
        SrcExpr::Fst(a) => c("Fst", vec![embed_src_expr(a)]),
        SrcExpr::Snd(a) => c("Snd", vec![embed_src_expr(a)]),
        SrcExpr::If(p, t, f) => c(
            "If",
            vec![embed_src_expr(p), embed_src_expr(t), embed_src_expr(f)],
        ),
    }
}

pub fn unembed_src_expr<I: Scalar>(v: &Value<I>) -> Result<SrcExpr<I>, UnembedError> {
    let bad = || UnembedError { what: "expression", found: v.to_string() };
    let Value::Construct(tag, args) = v else {
        return Err(bad());
    };
    let sub = |i: usize| unembed_src_expr(&args[i]).map(Box::new);
    Ok(match (tag.as_str(), args.len()) {
        ("X", 0) => SrcExpr::X,
        ("Num", 1) => match &args[0] {
            Value::Int(n) => SrcExpr::Num(n.clone()),
            _ => return Err(bad()),
        },
        ("Add", 2) => SrcExpr::Add(sub(0)?, sub(1)?),
        ("Mul", 2) => SrcExpr::Mul(sub(0)?, sub(1)?),
        ("Eq", 2) => SrcExpr::Eq(sub(0)?, sub(1)?),
        ("Pair", 2) => SrcExpr::Pair(sub(0)?, sub(1)?),
        ("Fst", 1) => SrcExpr::Fst(sub(0)?),
        ("Snd", 1) => SrcExpr::Snd(sub(0)?),
        ("If", 3) => SrcExpr::If(sub(0)?, sub(1)?, sub(2)?),
        _ => return Err(bad()),
    })
}

/// Embeds an SRC value: integers map to integers, pairs to MET tuples.
pub fn embed_src_value<I: Scalar>(v: &SrcValue<I>) -> Value<I> {
    match v {
        SrcValue::Int(n) => Value::Int(n.clone()),
        SrcValue::Pair(a, b) => Value::tuple(embed_src_value(a), embed_src_value(b)),
    }
}

pub fn unembed_src_value<I: Scalar>(v: &Value<I>) -> Result<SrcValue<I>, UnembedError> {
    match v {
        Value::Int(n) => Ok(SrcValue::Int(n.clone())),
        Value::Tuple(a, b) => Ok(SrcValue::pair(unembed_src_value(a)?, unembed_src_value(b)?)),
        _ => Err(UnembedError { what: "value", found: v.to_string() }),
    }
}

// --- text ------------------------------------------------------------------

impl<I: Scalar> fmt::Display for SrcExpr<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SrcExpr::X => f.write_str("x"),
            SrcExpr::Num(n) => write!(f, "{n}"),
            SrcExpr::Add(a, b) => write!(f, "(+ {a} {b})"),
            SrcExpr::Mul(a, b) => write!(f, "(* {a} {b})"),
            SrcExpr::Eq(a, b) => write!(f, "(= {a} {b})"),
            SrcExpr::Pair(a, b) => write!(f, "(pair {a} {b})"),
            SrcExpr::Fst(a) => write!(f, "(fst {a})"),
            SrcExpr::Snd(a) => write!(f, "(snd {a})"),
            SrcExpr::If(p, t, e) => write!(f, "(if {p} {t} {e})"),
        }
    }
}

impl<I: Scalar> fmt::Display for SrcValue<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SrcValue::Int(n) => write!(f, "{n}"),
            SrcValue::Pair(a, b) => write!(f, "(pair {a} {b})"),
        }
    }
}

pub fn print_src<I: Scalar>(e: &SrcExpr<I>) -> String {
    e.to_string()
}

#[derive(Debug)]
enum Sexp<'a> {
    Atom(&'a str, usize),
    List(Vec<Sexp<'a>>, usize),
}

struct SexpReader<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> SexpReader<'a> {
    fn error(&self, at: usize, message: impl Into<String>) -> SrcParseError {
        let before = &self.text[..at.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        SrcParseError { line, column, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn read(&mut self) -> Result<Sexp<'a>, SrcParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.text[self.pos..].chars().next() {
            None => Err(self.error(start, "unexpected end of input")),
            Some(')') => Err(self.error(start, "unexpected `)`")),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.text[self.pos..].chars().next() {
                        None => return Err(self.error(start, "unclosed `(`")),
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let len = self.text[self.pos..]
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(self.text.len() - self.pos);
                self.pos += len;
                Ok(Sexp::Atom(&self.text[start..self.pos], start))
            }
        }
    }
}

fn read_one(text: &str) -> Result<(Sexp<'_>, SexpReader<'_>), SrcParseError> {
    let mut r = SexpReader { text, pos: 0 };
    let s = r.read()?;
    r.skip_ws();
    if r.pos != text.len() {
        return Err(r.error(r.pos, "trailing input after expression"));
    }
    Ok((s, r))
}

fn to_expr<I: Scalar>(s: &Sexp<'_>, r: &SexpReader<'_>) -> Result<SrcExpr<I>, SrcParseError> {
    match s {
        Sexp::Atom("x", _) => Ok(SrcExpr::X),
        Sexp::Atom(a, at) => a
            .parse::<I>()
            .map(SrcExpr::Num)
            .map_err(|_| r.error(*at, format!("unknown atom `{a}`"))),
        Sexp::List(items, at) => {
            let Some(Sexp::Atom(head, _)) = items.first() else {
                return Err(r.error(*at, "expected an operator"));
            };
            let args = items[1..]
                .iter()
                .map(|a| to_expr(a, r).map(Box::new))
                .collect::<Result<Vec<_>, _>>()?;
            let arity = match *head {
                "+" | "*" | "=" | "pair" => 2,
                "fst" | "snd" => 1,
                "if" => 3,
                other => return Err(r.error(*at, format!("unknown form `{other}`"))),
            };
            if args.len() != arity {
                return Err(r.error(
                    *at,
                    format!("`{head}` takes {arity} argument(s), got {}", args.len()),
                ));
            }
            let mut it = args.into_iter();
            let mut next = || it.next().expect("arity checked");
            Ok(match *head {
                "+" => SrcExpr::Add(next(), next()),
                "*" => SrcExpr::Mul(next(), next()),
                "=" => SrcExpr::Eq(next(), next()),
                "pair" => SrcExpr::Pair(next(), next()),
                "fst" => SrcExpr::Fst(next()),
                "snd" => SrcExpr::Snd(next()),
                _ => SrcExpr::If(next(), next(), next()),
            })
        }
    }
}

pub fn parse_src<I: Scalar>(text: &str) -> Result<SrcExpr<I>, SrcParseError> {
    let (s, r) = read_one(text)?;
    to_expr(&s, &r)
}

/// Parses a value written as integers and `(pair a b)`.
pub fn parse_src_value<I: Scalar>(text: &str) -> Result<SrcValue<I>, SrcParseError> {
    fn lit<I: Scalar>(e: SrcExpr<I>) -> Option<SrcValue<I>> {
        match e {
            SrcExpr::Num(n) => Some(SrcValue::Int(n)),
            SrcExpr::Pair(a, b) => Some(SrcValue::pair(lit(*a)?, lit(*b)?)),
            _ => None,
        }
    }
    let e = parse_src(text)?;
    lit(e).ok_or_else(|| SrcParseError {
        line: 1,
        column: 1,
        message: "a value may only contain integers and `pair`".into(),
    })
}

// --- random generation -----------------------------------------------------

/// Structural type of an SRC value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Int,
    Pair(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn pair(a: Shape, b: Shape) -> Self {
        Shape::Pair(Box::new(a), Box::new(b))
    }

    pub fn random(rng: &mut impl Rng, depth: usize) -> Shape {
        if depth == 0 || rng.gen_bool(0.6) {
            Shape::Int
        } else {
            Shape::pair(Shape::random(rng, depth - 1), Shape::random(rng, depth - 1))
        }
    }
}

fn random_int<I: Scalar>(rng: &mut (impl Rng + ?Sized), magnitude: i64) -> I {
    I::from_i64_wrapping(rng.gen_range(-magnitude..=magnitude))
}

/// Random value with nesting at most `depth_bound` and integers in
/// `[-magnitude_bound, magnitude_bound]`.
pub fn gen_random_src_value<I: Scalar>(
    rng: &mut impl Rng,
    depth_bound: usize,
    magnitude_bound: i64,
) -> SrcValue<I> {
    if depth_bound == 0 || rng.gen_bool(0.5) {
        SrcValue::Int(random_int(rng, magnitude_bound))
    } else {
        SrcValue::pair(
            gen_random_src_value(rng, depth_bound - 1, magnitude_bound),
            gen_random_src_value(rng, depth_bound - 1, magnitude_bound),
        )
    }
}

/// Seeded convenience wrapper around [`gen_random_src_value`].
pub fn random_src_value<I: Scalar>(seed: u64, depth_bound: usize, magnitude_bound: i64) -> SrcValue<I> {
    gen_random_src_value(&mut ChaCha8Rng::seed_from_u64(seed), depth_bound, magnitude_bound)
}

pub fn gen_value_of_shape<I: Scalar>(rng: &mut impl Rng, shape: &Shape, magnitude: i64) -> SrcValue<I> {
    match shape {
        Shape::Int => SrcValue::Int(random_int(rng, magnitude)),
        Shape::Pair(a, b) => SrcValue::pair(
            gen_value_of_shape(rng, a, magnitude),
            gen_value_of_shape(rng, b, magnitude),
        ),
    }
}

/// Projection chains from `x` that reach a component of shape `target`.
fn paths_to<I: Scalar>(input: &Shape, target: &Shape) -> Vec<SrcExpr<I>> {
    fn go<I: Scalar>(here: &Shape, target: &Shape, prefix: SrcExpr<I>, out: &mut Vec<SrcExpr<I>>) {
        if here == target {
            out.push(prefix.clone());
        }
        if let Shape::Pair(a, b) = here {
            go(a, target, SrcExpr::fst(prefix.clone()), out);
            go(b, target, SrcExpr::snd(prefix), out);
        }
    }
    let mut out = Vec::new();
    go(input, target, SrcExpr::X, &mut out);
    out
}

/// Random program that evaluates without getting stuck on any input of
/// shape `input` and produces a value of shape `target`.
pub fn gen_typed_src_expr<I: Scalar>(
    rng: &mut impl Rng,
    input: &Shape,
    target: &Shape,
    depth: usize,
    magnitude: i64,
) -> SrcExpr<I> {
    let paths = paths_to::<I>(input, target);
    let leaf = |rng: &mut dyn rand::RngCore| -> Option<SrcExpr<I>> {
        match target {
            Shape::Int if paths.is_empty() || rng.gen_bool(0.4) => {
                Some(SrcExpr::Num(random_int(rng, magnitude)))
            }
            _ if !paths.is_empty() => Some(paths[rng.gen_range(0..paths.len())].clone()),
            _ => None,
        }
    };
    if depth == 0 || rng.gen_bool(0.2) {
        if let Some(e) = leaf(rng) {
            return e;
        }
    }
    let d = depth.saturating_sub(1);
    let sub = |rng: &mut _, t: &Shape| gen_typed_src_expr(rng, input, t, d, magnitude);
    if depth == 0 {
        // No projection reaches a pair of this shape: build it.
        if let Shape::Pair(a, b) = target {
            return SrcExpr::pair(sub(rng, a), sub(rng, b));
        }
    }
    match target {
        Shape::Int => match rng.gen_range(0..6) {
            0 => SrcExpr::add(sub(rng, &Shape::Int), sub(rng, &Shape::Int)),
            1 => SrcExpr::mul(sub(rng, &Shape::Int), sub(rng, &Shape::Int)),
            2 => SrcExpr::eq(sub(rng, &Shape::Int), sub(rng, &Shape::Int)),
            3 => SrcExpr::if_(sub(rng, &Shape::Int), sub(rng, target), sub(rng, target)),
            4 => {
                let other = Shape::random(rng, 1);
                SrcExpr::fst(sub(rng, &Shape::pair(target.clone(), other)))
            }
            _ => {
                let other = Shape::random(rng, 1);
                SrcExpr::snd(sub(rng, &Shape::pair(other, target.clone())))
            }
        },
        Shape::Pair(a, b) => match rng.gen_range(0..4) {
            0 | 1 => SrcExpr::pair(sub(rng, a), sub(rng, b)),
            2 => SrcExpr::if_(sub(rng, &Shape::Int), sub(rng, target), sub(rng, target)),
            _ => SrcExpr::fst(sub(rng, &Shape::pair(target.clone(), Shape::Int))),
        },
    }
}

/// A random well-shaped `(program, input)` pair.
pub fn gen_src_case<I: Scalar>(
    rng: &mut impl Rng,
    depth: usize,
    magnitude: i64,
) -> (SrcExpr<I>, SrcValue<I>) {
    let input_shape = Shape::random(rng, 2);
    let output_shape = Shape::random(rng, 1);
    let e = gen_typed_src_expr(rng, &input_shape, &output_shape, depth, magnitude);
    let v = gen_value_of_shape(rng, &input_shape, magnitude);
    (e, v)
}
