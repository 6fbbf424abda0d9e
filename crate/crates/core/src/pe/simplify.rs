//! Cleanup of let-bindings introduced during specialization.
//!
//! Only names in `temps` are touched. Such a binding is dropped when unused
//! and inlined when used exactly once outside any function body or match
//! branch, so evaluation work is neither duplicated nor moved under a
//! binder. Binder names in residual code are unique, which makes the
//! substitution capture-free.

use std::collections::{HashMap, HashSet};

use crate::met::{Expr, Name};

pub fn simplify<I: Clone>(e: &Expr<I>, temps: &HashSet<Name>) -> Expr<I> {
    let mut e = e.clone();
    loop {
        let mut uses = HashMap::new();
        count_uses(&e, &mut uses);
        let mut changed = false;
        e = pass(e, temps, &uses, &mut changed);
        if !changed {
            return e;
        }
    }
}

fn count_uses<I>(e: &Expr<I>, uses: &mut HashMap<Name, usize>) {
    let mut stack = vec![e];
    while let Some(e) = stack.pop() {
        match e {
            Expr::Var(x) => *uses.entry(x.clone()).or_default() += 1,
            Expr::Int(_) => {}
            Expr::Tuple(a, b) | Expr::Let(_, a, b) | Expr::App(a, b) => stack.extend([&**a, &**b]),
            Expr::Fst(a) | Expr::Snd(a) => stack.push(a),
            Expr::Construct(_, args) | Expr::Prim(_, args) => stack.extend(args),
            Expr::Match(s, bs) => {
                stack.push(s);
                stack.extend(bs.iter().map(|(_, b)| b));
            }
            Expr::LetRec { body, cont, .. } => stack.extend([&**body, &**cont]),
            Expr::Lambda(_, body) => stack.push(body),
        }
    }
}

fn pass<I: Clone>(
    e: Expr<I>,
    temps: &HashSet<Name>,
    uses: &HashMap<Name, usize>,
    changed: &mut bool,
) -> Expr<I> {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || {
        let mut go = |e: Expr<I>| pass(e, temps, uses, changed);
        match e {
            Expr::Let(x, bound, body) if temps.contains(&x) => {
                let n = uses.get(&x).copied().unwrap_or(0);
                let bound = go(*bound);
                let body = go(*body);
                if n == 0 {
                    *changed = true;
                    return body;
                }
                if n == 1 {
                    let mut slot = Some(bound);
                    let body = substitute(body, &x, &mut slot, false);
                    match slot {
                        None => {
                            *changed = true;
                            return body;
                        }
                        Some(bound) => return Expr::let_(x, bound, body),
                    }
                }
                Expr::let_(x, bound, body)
            }
            Expr::Var(_) | Expr::Int(_) => e,
            Expr::Tuple(a, b) => Expr::tuple(go(*a), go(*b)),
            Expr::Fst(a) => Expr::fst(go(*a)),
            Expr::Snd(a) => Expr::snd(go(*a)),
            Expr::Construct(t, args) => Expr::Construct(t, args.into_iter().map(go).collect()),
            Expr::Prim(op, args) => Expr::Prim(op, args.into_iter().map(go).collect()),
            Expr::Match(s, bs) => {
                let s = go(*s);
                Expr::matches(s, bs.into_iter().map(|(p, b)| (p, go(b))).collect())
            }
            Expr::Let(x, a, b) => {
                let a = go(*a);
                Expr::let_(x, a, go(*b))
            }
            Expr::LetRec { name, param, body, cont } => {
                let body = go((*body).clone());
                Expr::LetRec { name, param, body: body.into(), cont: Box::new(go(*cont)) }
            }
            Expr::Lambda(x, body) => Expr::lambda(x, go((*body).clone())),
            Expr::App(f, a) => {
                let f = go(*f);
                Expr::app(f, go(*a))
            }
        }
    })
}

/// Replaces the single occurrence of `x` by the expression in `slot`,
/// unless that occurrence is guarded by a function body or match branch.
/// The slot is emptied exactly when the replacement happened.
fn substitute<I: Clone>(e: Expr<I>, x: &str, slot: &mut Option<Expr<I>>, guarded: bool) -> Expr<I> {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || {
        let mut go = |e: Expr<I>, g: bool| substitute(e, x, slot, guarded || g);
        match e {
            Expr::Var(y) if y == x => {
                if guarded {
                    Expr::Var(y)
                } else {
                    slot.take().expect("single use")
                }
            }
            Expr::Var(_) | Expr::Int(_) => e,
            Expr::Tuple(a, b) => {
                let a = go(*a, false);
                Expr::tuple(a, go(*b, false))
            }
            Expr::Fst(a) => Expr::fst(go(*a, false)),
            Expr::Snd(a) => Expr::snd(go(*a, false)),
            Expr::Construct(t, args) => {
                Expr::Construct(t, args.into_iter().map(|a| go(a, false)).collect())
            }
            Expr::Prim(op, args) => Expr::Prim(op, args.into_iter().map(|a| go(a, false)).collect()),
            Expr::Match(s, bs) => {
                let s = go(*s, false);
                Expr::matches(s, bs.into_iter().map(|(p, b)| (p, go(b, true))).collect())
            }
            Expr::Let(y, a, b) => {
                let a = go(*a, false);
                Expr::let_(y, a, go(*b, false))
            }
            Expr::LetRec { name, param, body, cont } => {
                let body = go((*body).clone(), true);
                Expr::LetRec { name, param, body: body.into(), cont: Box::new(go(*cont, false)) }
            }
            Expr::Lambda(y, body) => Expr::lambda(y, go((*body).clone(), true)),
            Expr::App(f, a) => {
                let f = go(*f, false);
                Expr::app(f, go(*a, false))
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::met::{parse_met, print_met};

    fn temps(names: &[&str]) -> HashSet<Name> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn inlines_single_use_and_drops_dead() {
        let e: Expr<i64> = parse_met("let a = x + 1 in let b = x * 2 in let c = a * 3 in c").unwrap();
        let out = simplify(&e, &temps(&["a", "b", "c"]));
        assert_eq!(print_met(&out), "(x + 1) * 3");
    }

    #[test]
    fn keeps_shared_and_guarded() {
        let e: Expr<i64> =
            parse_met("let a = x + 1 in let b = x * 2 in (a * a, fun y -> b)").unwrap();
        let out = simplify(&e, &temps(&["a", "b"]));
        assert_eq!(out, e);
    }

    #[test]
    fn leaves_source_lets() {
        let e: Expr<i64> = parse_met("let a = x + 1 in a").unwrap();
        assert_eq!(simplify(&e, &temps(&[])), e);
    }
}
