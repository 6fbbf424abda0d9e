//! Pretty-printer producing the normative concrete syntax.
//!
//! Precedence levels, loosest first: 0 `let`/`fun`/`match`, 1 `=`, 2 `+`,
//! 3 `*`, 4 application, 5 `fst`/`snd`, 6 atoms.

use std::fmt::Write;

use super::{Expr, Pattern, PrimOp};
use crate::scalar::Scalar;

pub fn print_met<I: Scalar>(e: &Expr<I>) -> String {
    let mut out = String::new();
    expr(e, 0, 0, &mut out);
    out
}

fn level<I>(e: &Expr<I>) -> u8 {
    match e {
        Expr::Let(..) | Expr::LetRec { .. } | Expr::Lambda(..) | Expr::Match(..) => 0,
        Expr::Prim(PrimOp::Eq, args) if args.len() == 2 => 1,
        Expr::Prim(PrimOp::Add, args) if args.len() == 2 => 2,
        Expr::Prim(PrimOp::Mul, args) if args.len() == 2 => 3,
        Expr::App(..) => 4,
        Expr::Fst(_) | Expr::Snd(_) => 5,
        _ => 6,
    }
}

fn newline(indent: usize, out: &mut String) {
    out.push('\n');
    out.extend(std::iter::repeat_n(' ', indent));
}

fn expr<I: Scalar>(e: &Expr<I>, min: u8, indent: usize, out: &mut String) {
    stacker::maybe_grow(64 * 1024, 1024 * 1024, || {
        if level(e) < min {
            out.push('(');
            expr(e, 0, indent + 1, out);
            out.push(')');
        } else {
            bare(e, indent, out);
        }
    })
}

fn bare<I: Scalar>(e: &Expr<I>, indent: usize, out: &mut String) {
    match e {
        Expr::Var(x) => out.push_str(x),
        Expr::Int(n) => write!(out, "{n}").unwrap(),
        Expr::Tuple(a, b) => {
            out.push('(');
            expr(a, 0, indent + 1, out);
            out.push_str(", ");
            expr(b, 0, indent + 1, out);
            out.push(')');
        }
        Expr::Fst(a) => {
            out.push_str("fst ");
            expr(a, 5, indent, out);
        }
        Expr::Snd(a) => {
            out.push_str("snd ");
            expr(a, 5, indent, out);
        }
        Expr::Construct(tag, args) => {
            out.push_str(tag);
            if !args.is_empty() {
                arg_list(args, indent, out);
            }
        }
        Expr::Match(s, branches) => {
            out.push_str("match ");
            expr(s, 0, indent + 6, out);
            out.push_str(" with");
            for (i, (p, body)) in branches.iter().enumerate() {
                newline(indent + 2, out);
                out.push_str("| ");
                pattern(p, out);
                out.push_str(" -> ");
                // A nested open-ended body would swallow the following branches.
                let min = if i + 1 < branches.len() { 1 } else { 0 };
                expr(body, min, indent + 4, out);
            }
        }
        Expr::Let(x, bound, body) => {
            write!(out, "let {x} = ").unwrap();
            expr(bound, 0, indent + 2, out);
            out.push_str(" in");
            newline(indent, out);
            expr(body, 0, indent, out);
        }
        Expr::LetRec { name, param, body, cont } => {
            write!(out, "let rec {name} {param} =").unwrap();
            newline(indent + 2, out);
            expr(body, 0, indent + 2, out);
            newline(indent, out);
            out.push_str("in");
            newline(indent, out);
            expr(cont, 0, indent, out);
        }
        Expr::Lambda(x, body) => {
            write!(out, "fun {x} -> ").unwrap();
            expr(body, 0, indent, out);
        }
        Expr::App(f, a) => {
            expr(f, 4, indent, out);
            out.push(' ');
            expr(a, 6, indent, out);
        }
        Expr::Prim(op, args) => match (op.keyword(), &args[..]) {
            (None, [a, b]) => {
                let (sym, l, r) = match op {
                    PrimOp::Eq => ("=", 2, 2),
                    PrimOp::Add => ("+", 2, 3),
                    _ => ("*", 3, 4),
                };
                expr(a, l, indent, out);
                write!(out, " {sym} ").unwrap();
                expr(b, r, indent, out);
            }
            (Some(kw), _) => {
                out.push_str(kw);
                arg_list(args, indent, out);
            }
            // Malformed arity has no concrete syntax; emit something readable.
            (None, _) => {
                write!(out, "{}", op.census_name()).unwrap();
                arg_list(args, indent, out);
            }
        },
    }
}

fn arg_list<I: Scalar>(args: &[Expr<I>], indent: usize, out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(a, 0, indent + 2, out);
    }
    out.push(')');
}

fn pattern<I: Scalar>(p: &Pattern<I>, out: &mut String) {
    match p {
        Pattern::Var(x) => out.push_str(x),
        Pattern::Wild => out.push('_'),
        Pattern::Int(n) => write!(out, "{n}").unwrap(),
        Pattern::Tuple(a, b) => {
            out.push('(');
            pattern(a, out);
            out.push_str(", ");
            pattern(b, out);
            out.push(')');
        }
        Pattern::Construct(tag, ps) => {
            out.push_str(tag);
            if !ps.is_empty() {
                out.push('(');
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    pattern(p, out);
                }
                out.push(')');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = Expr<i64>;

    #[test]
    fn atoms_and_tuples() {
        assert_eq!(print_met(&E::Int(5)), "5");
        assert_eq!(print_met(&E::tuple(E::Int(1), E::Int(2))), "(1, 2)");
        assert_eq!(print_met(&E::Construct("X".into(), vec![])), "X");
    }

    #[test]
    fn precedence() {
        let sum = E::prim(PrimOp::Add, vec![E::var("a"), E::var("b")]);
        let e = E::prim(PrimOp::Mul, vec![sum.clone(), E::var("c")]);
        assert_eq!(print_met(&e), "(a + b) * c");
        let e = E::prim(PrimOp::Add, vec![E::var("c"), sum]);
        assert_eq!(print_met(&e), "c + (a + b)");
        let e = E::fst(E::app(E::var("f"), E::var("x")));
        assert_eq!(print_met(&e), "fst (f x)");
        let e = E::app(E::var("f"), E::fst(E::var("x")));
        assert_eq!(print_met(&e), "f (fst x)");
        assert_eq!(print_met(&E::fst(E::fst(E::var("x")))), "fst fst x");
    }

    #[test]
    fn abstract_prims_use_call_syntax() {
        let e = E::prim(PrimOp::AFilterNe0, vec![E::var("p"), E::prim(PrimOp::Eta, vec![E::Int(0)])]);
        assert_eq!(print_met(&e), "fne0(p, eta(0))");
    }
}
