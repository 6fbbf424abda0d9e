//! MET, the meta-language: a small call-by-value ML with tuples, algebraic
//! constructors, pattern matching, recursion and a fixed set of primitives.
//!
//! Programs are data ([`Expr`]) so the partial evaluator can consume them.
//! The abstract primitives delegate to [`crate::domain`].

mod census;
mod eval;
mod parse;
mod print;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::domain::AbsValue;
use crate::scalar::Scalar;

pub use census::{count_nodes, NodeCensus};
pub use eval::{apply, eval, eval_closed, EvalBudget, EvalError, DEFAULT_FUEL};
pub(crate) use eval::{apply_prim, match_pattern, project};
pub use eval::to_abs;
pub use parse::{parse_met, parse_met_with, ParseError};
pub use print::print_met;

pub type Name = String;
pub type Tag = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimOp {
    Add,
    Mul,
    Eq,
    Eta,
    AAdd,
    AMul,
    AEq,
    AJoin,
    AFilterNe0,
    AFilterEq0,
}

impl PrimOp {
    pub const ALL: [PrimOp; 10] = [
        PrimOp::Add,
        PrimOp::Mul,
        PrimOp::Eq,
        PrimOp::Eta,
        PrimOp::AAdd,
        PrimOp::AMul,
        PrimOp::AEq,
        PrimOp::AJoin,
        PrimOp::AFilterNe0,
        PrimOp::AFilterEq0,
    ];

    pub fn arity(self) -> usize {
        match self {
            PrimOp::Eta => 1,
            _ => 2,
        }
    }

    pub fn is_abstract(self) -> bool {
        !matches!(self, PrimOp::Add | PrimOp::Mul | PrimOp::Eq)
    }

    /// Census key, e.g. `AFILTER_NE0`.
    pub fn census_name(self) -> &'static str {
        match self {
            PrimOp::Add => "ADD",
            PrimOp::Mul => "MUL",
            PrimOp::Eq => "EQ",
            PrimOp::Eta => "ETA",
            PrimOp::AAdd => "AADD",
            PrimOp::AMul => "AMUL",
            PrimOp::AEq => "AEQ",
            PrimOp::AJoin => "AJOIN",
            PrimOp::AFilterNe0 => "AFILTER_NE0",
            PrimOp::AFilterEq0 => "AFILTER_EQ0",
        }
    }

    /// Prefix-call keyword for abstract primitives; `None` for infix ones.
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            PrimOp::Add | PrimOp::Mul | PrimOp::Eq => None,
            PrimOp::Eta => Some("eta"),
            PrimOp::AAdd => Some("aadd"),
            PrimOp::AMul => Some("amul"),
            PrimOp::AEq => Some("aeq"),
            PrimOp::AJoin => Some("ajoin"),
            PrimOp::AFilterNe0 => Some("fne0"),
            PrimOp::AFilterEq0 => Some("feq0"),
        }
    }

    pub fn from_keyword(kw: &str) -> Option<PrimOp> {
        PrimOp::ALL.into_iter().find(|op| op.keyword() == Some(kw))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern<I> {
    Var(Name),
    Wild,
    Int(I),
    Tuple(Box<Pattern<I>>, Box<Pattern<I>>),
    Construct(Tag, Vec<Pattern<I>>),
}

impl<I> Pattern<I> {
    pub fn tuple(a: Pattern<I>, b: Pattern<I>) -> Self {
        Pattern::Tuple(Box::new(a), Box::new(b))
    }

    /// Variables bound by the pattern, left to right.
    pub fn binders(&self) -> Vec<&Name> {
        fn go<'a, I>(p: &'a Pattern<I>, out: &mut Vec<&'a Name>) {
            match p {
                Pattern::Var(x) => out.push(x),
                Pattern::Wild | Pattern::Int(_) => {}
                Pattern::Tuple(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Pattern::Construct(_, ps) => ps.iter().for_each(|p| go(p, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn is_linear(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.binders().into_iter().all(|x| seen.insert(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr<I> {
    Var(Name),
    Int(I),
    Tuple(Box<Expr<I>>, Box<Expr<I>>),
    Fst(Box<Expr<I>>),
    Snd(Box<Expr<I>>),
    Construct(Tag, Vec<Expr<I>>),
    Match(Box<Expr<I>>, Vec<(Pattern<I>, Expr<I>)>),
    Let(Name, Box<Expr<I>>, Box<Expr<I>>),
    /// `let rec f x = body in cont`
    LetRec {
        name: Name,
        param: Name,
        body: Arc<Expr<I>>,
        cont: Box<Expr<I>>,
    },
    Lambda(Name, Arc<Expr<I>>),
    App(Box<Expr<I>>, Box<Expr<I>>),
    Prim(PrimOp, Vec<Expr<I>>),
}

impl<I> Expr<I> {
    pub fn var(x: impl Into<Name>) -> Self {
        Expr::Var(x.into())
    }

    pub fn tuple(a: Expr<I>, b: Expr<I>) -> Self {
        Expr::Tuple(Box::new(a), Box::new(b))
    }

    pub fn fst(e: Expr<I>) -> Self {
        Expr::Fst(Box::new(e))
    }

    pub fn snd(e: Expr<I>) -> Self {
        Expr::Snd(Box::new(e))
    }

    pub fn let_(x: impl Into<Name>, bound: Expr<I>, body: Expr<I>) -> Self {
        Expr::Let(x.into(), Box::new(bound), Box::new(body))
    }

    pub fn lambda(x: impl Into<Name>, body: Expr<I>) -> Self {
        Expr::Lambda(x.into(), Arc::new(body))
    }

    pub fn app(f: Expr<I>, a: Expr<I>) -> Self {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn prim(op: PrimOp, args: Vec<Expr<I>>) -> Self {
        Expr::Prim(op, args)
    }

    pub fn matches(scrutinee: Expr<I>, branches: Vec<(Pattern<I>, Expr<I>)>) -> Self {
        Expr::Match(Box::new(scrutinee), branches)
    }

    /// Variables used but not bound, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Name> {
        fn go<I>(e: &Expr<I>, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
            stacker::maybe_grow(64 * 1024, 1024 * 1024, || visit(e, bound, out))
        }
        fn visit<I>(e: &Expr<I>, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
            let under = |names: Vec<&Name>, e: &Expr<I>, bound: &mut Vec<Name>, out: &mut Vec<Name>| {
                let n = bound.len();
                bound.extend(names.into_iter().cloned());
                go(e, bound, out);
                bound.truncate(n);
            };
            match e {
                Expr::Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Expr::Int(_) => {}
                Expr::Tuple(a, b) | Expr::App(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Expr::Fst(a) | Expr::Snd(a) => go(a, bound, out),
                Expr::Construct(_, args) | Expr::Prim(_, args) => args.iter().for_each(|a| go(a, bound, out)),
                Expr::Let(x, a, b) => {
                    go(a, bound, out);
                    under(vec![x], b, bound, out);
                }
                Expr::LetRec { name, param, body, cont } => {
                    under(vec![name, param], body, bound, out);
                    under(vec![name], cont, bound, out);
                }
                Expr::Lambda(x, body) => under(vec![x], body, bound, out),
                Expr::Match(s, branches) => {
                    go(s, bound, out);
                    for (p, body) in branches {
                        under(p.binders(), body, bound, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Checks constructor tags and arities against `sig`, primitive arities
    /// and pattern linearity.
    pub fn check(&self, sig: &Signature) -> Result<(), String> {
        fn pat<I>(p: &Pattern<I>, sig: &Signature) -> Result<(), String> {
            match p {
                Pattern::Construct(tag, ps) => {
                    sig.check(tag, ps.len())?;
                    ps.iter().try_for_each(|p| pat(p, sig))
                }
                Pattern::Tuple(a, b) => {
                    pat(a, sig)?;
                    pat(b, sig)
                }
                _ => Ok(()),
            }
        }
        match self {
            Expr::Var(_) | Expr::Int(_) => Ok(()),
            Expr::Tuple(a, b) | Expr::App(a, b) | Expr::Let(_, a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Expr::Fst(e) | Expr::Snd(e) => e.check(sig),
            Expr::Lambda(_, body) => body.check(sig),
            Expr::LetRec { body, cont, .. } => {
                body.check(sig)?;
                cont.check(sig)
            }
            Expr::Construct(tag, args) => {
                sig.check(tag, args.len())?;
                args.iter().try_for_each(|a| a.check(sig))
            }
            Expr::Prim(op, args) => {
                if args.len() != op.arity() {
                    return Err(format!(
                        "primitive {} expects {} argument(s), got {}",
                        op.census_name(),
                        op.arity(),
                        args.len()
                    ));
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
            Expr::Match(s, branches) => {
                s.check(sig)?;
                for (p, body) in branches {
                    if !p.is_linear() {
                        return Err("non-linear pattern".to_string());
                    }
                    pat(p, sig)?;
                    body.check(sig)?;
                }
                Ok(())
            }
        }
    }
}

/// Declared constructor tags and their arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Tag, usize>,
}

impl Signature {
    pub fn empty() -> Self {
        Signature { arities: BTreeMap::new() }
    }

    /// The embedded SRC syntax tree constructors.
    pub fn src() -> Self {
        let mut sig = Signature::empty();
        for (tag, arity) in crate::src_lang::SRC_TAGS {
            sig = sig.with(tag, arity);
        }
        sig
    }

    pub fn with(mut self, tag: impl Into<Tag>, arity: usize) -> Self {
        self.arities.insert(tag.into(), arity);
        self
    }

    pub fn arity(&self, tag: &str) -> Option<usize> {
        self.arities.get(tag).copied()
    }

    fn check(&self, tag: &str, arity: usize) -> Result<(), String> {
        match self.arity(tag) {
            None => Err(format!("unknown constructor `{tag}`")),
            Some(n) if n != arity => Err(format!(
                "constructor `{tag}` expects {n} argument(s), got {arity}"
            )),
            Some(_) => Ok(()),
        }
    }
}

/// SRC constructors plus the tags used by the shipped MET fixtures.
impl Default for Signature {
    fn default() -> Self {
        Signature::src()
            .with("Nil", 0)
            .with("Cons", 2)
            .with("Z", 0)
            .with("S", 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value<I> {
    Int(I),
    Tuple(Box<Value<I>>, Box<Value<I>>),
    Construct(Tag, Vec<Value<I>>),
    Closure(Closure<I>),
    Abs(AbsValue<I>),
}

impl<I> Value<I> {
    pub fn tuple(a: Value<I>, b: Value<I>) -> Self {
        Value::Tuple(Box::new(a), Box::new(b))
    }

    pub fn construct(tag: impl Into<Tag>, args: Vec<Value<I>>) -> Self {
        Value::Construct(tag.into(), args)
    }

    /// True when the value contains no closures.
    pub fn is_first_order(&self) -> bool {
        match self {
            Value::Int(_) | Value::Abs(_) => true,
            Value::Tuple(a, b) => a.is_first_order() && b.is_first_order(),
            Value::Construct(_, args) => args.iter().all(Value::is_first_order),
            Value::Closure(_) => false,
        }
    }
}

impl<I: Scalar> fmt::Display for Value<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Tuple(a, b) => write!(f, "({a}, {b})"),
            Value::Construct(tag, args) if args.is_empty() => write!(f, "{tag}"),
            Value::Construct(tag, args) => {
                write!(f, "{tag}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Value::Closure(c) => write!(f, "<fun {}>", c.param),
            Value::Abs(a) => write!(f, "#{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Closure<I> {
    /// Set for `let rec` closures; the name is rebound to the closure on entry.
    pub rec_name: Option<Name>,
    pub param: Name,
    pub body: Arc<Expr<I>>,
    pub env: Env<I>,
}

/// Persistent environment; extending shares the tail.
#[derive(Debug, Clone)]
pub struct Env<I> {
    head: Option<Arc<EnvNode<I>>>,
}

#[derive(Debug)]
struct EnvNode<I> {
    name: Name,
    value: Value<I>,
    next: Option<Arc<EnvNode<I>>>,
}

impl<I> Default for Env<I> {
    fn default() -> Self {
        Env { head: None }
    }
}

impl<I> Env<I> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extend(&self, name: impl Into<Name>, value: Value<I>) -> Self {
        Env {
            head: Some(Arc::new(EnvNode {
                name: name.into(),
                value,
                next: self.head.clone(),
            })),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Value<I>> {
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = node.next.as_deref();
        }
        None
    }

    /// Bindings from innermost to outermost, shadowed ones included.
    pub(crate) fn bindings(&self) -> Vec<(&Name, &Value<I>)> {
        let mut out = Vec::new();
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            out.push((&node.name, &node.value));
            cur = node.next.as_deref();
        }
        out
    }

    pub fn from_bindings(bindings: impl IntoIterator<Item = (Name, Value<I>)>) -> Self {
        bindings
            .into_iter()
            .fold(Env::new(), |env, (x, v)| env.extend(x, v))
    }
}

// Environments are compared by identity: closures are equal only when they
// share their captured scope.
impl<I> PartialEq for Env<I> {
    fn eq(&self, other: &Self) -> bool {
        match (&self.head, &other.head) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables() {
        let e: Expr<i64> = parse_met("fun x -> let y = x + z in match y with | S(w) -> w + v | _ -> y").unwrap();
        assert_eq!(e.free_vars(), vec!["z".to_string(), "v".to_string()]);
    }

    #[test]
    fn pattern_linearity() {
        let p: Pattern<i64> = Pattern::tuple(Pattern::Var("a".into()), Pattern::Var("a".into()));
        assert!(!p.is_linear());
        let q: Pattern<i64> = Pattern::Construct(
            "Add".into(),
            vec![Pattern::Var("a".into()), Pattern::Var("b".into())],
        );
        assert!(q.is_linear());
    }

    #[test]
    fn signature_rejects_bad_arity() {
        let sig = Signature::src();
        let e: Expr<i64> = Expr::Construct("Num".into(), vec![]);
        assert!(e.check(&sig).is_err());
        let e: Expr<i64> = Expr::Construct("Bogus".into(), vec![]);
        assert!(e.check(&sig).is_err());
        let e: Expr<i64> = Expr::Construct("Num".into(), vec![Expr::Int(1)]);
        assert!(e.check(&sig).is_ok());
    }

    #[test]
    fn env_shadowing() {
        let env: Env<i64> = Env::new().extend("x", Value::Int(1)).extend("x", Value::Int(2));
        assert_eq!(env.lookup("x"), Some(&Value::Int(2)));
        assert_eq!(env.lookup("y"), None);
    }

    #[test]
    fn prim_keywords_round_trip() {
        for op in PrimOp::ALL {
            if let Some(kw) = op.keyword() {
                assert_eq!(PrimOp::from_keyword(kw), Some(op));
            }
        }
    }
}
