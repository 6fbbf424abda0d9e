//! Call-by-value evaluator for MET with a step budget.

use thiserror::Error;

use super::{Closure, Env, Expr, Name, Pattern, PrimOp, Value};
use crate::domain::{AbsValue, Domain};
use crate::scalar::Scalar;

pub const DEFAULT_FUEL: u64 = 1_000_000;

// Grow the native stack on deep recursion; fuel bounds the work, not depth.
const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROW: usize = 4 * 1024 * 1024;

/// Counts evaluation rule applications against a fuel limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    pub fuel: u64,
    pub steps_used: u64,
}

impl EvalBudget {
    pub fn new(fuel: u64) -> Self {
        EvalBudget { fuel, steps_used: 0 }
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        if self.steps_used >= self.fuel {
            return Err(EvalError::FuelExhausted { fuel: self.fuel });
        }
        self.steps_used += 1;
        Ok(())
    }
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget::new(DEFAULT_FUEL)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("stuck: {0}")]
    Stuck(String),
    #[error("fuel exhausted after {fuel} steps")]
    FuelExhausted { fuel: u64 },
}

fn stuck<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Stuck(msg.into()))
}

pub fn eval_closed<I: Scalar>(
    e: &Expr<I>,
    domain: Domain,
    budget: &mut EvalBudget,
) -> Result<Value<I>, EvalError> {
    eval(e, &Env::new(), domain, budget)
}

pub fn eval<I: Scalar>(
    e: &Expr<I>,
    env: &Env<I>,
    domain: Domain,
    budget: &mut EvalBudget,
) -> Result<Value<I>, EvalError> {
    stacker::maybe_grow(STACK_RED_ZONE, STACK_GROW, || eval_inner(e, env, domain, budget))
}

fn eval_inner<I: Scalar>(
    e: &Expr<I>,
    env: &Env<I>,
    domain: Domain,
    budget: &mut EvalBudget,
) -> Result<Value<I>, EvalError> {
    budget.tick()?;
    match e {
        Expr::Var(x) => match env.lookup(x) {
            Some(v) => Ok(v.clone()),
            None => stuck(format!("unbound variable `{x}`")),
        },
        Expr::Int(n) => Ok(Value::Int(n.clone())),
        Expr::Tuple(a, b) => {
            let a = eval(a, env, domain, budget)?;
            let b = eval(b, env, domain, budget)?;
            Ok(Value::tuple(a, b))
        }
        Expr::Fst(a) => project(eval(a, env, domain, budget)?, true),
        Expr::Snd(a) => project(eval(a, env, domain, budget)?, false),
        Expr::Construct(tag, args) => {
            let args = args
                .iter()
                .map(|a| eval(a, env, domain, budget))
                .collect::<Result<_, _>>()?;
            Ok(Value::Construct(tag.clone(), args))
        }
        Expr::Match(scrutinee, branches) => {
            let v = eval(scrutinee, env, domain, budget)?;
            for (pat, body) in branches {
                if let Some(bindings) = match_pattern(pat, &v) {
                    let env = bindings
                        .into_iter()
                        .fold(env.clone(), |env, (x, v)| env.extend(x.clone(), v));
                    return eval(body, &env, domain, budget);
                }
            }
            stuck(format!("no match branch applies to {v}"))
        }
        Expr::Let(x, bound, body) => {
            let v = eval(bound, env, domain, budget)?;
            eval(body, &env.extend(x.clone(), v), domain, budget)
        }
        Expr::LetRec { name, param, body, cont } => {
            let f = Value::Closure(Closure {
                rec_name: Some(name.clone()),
                param: param.clone(),
                body: body.clone(),
                env: env.clone(),
            });
            eval(cont, &env.extend(name.clone(), f), domain, budget)
        }
        Expr::Lambda(param, body) => Ok(Value::Closure(Closure {
            rec_name: None,
            param: param.clone(),
            body: body.clone(),
            env: env.clone(),
        })),
        Expr::App(f, a) => {
            let f = eval(f, env, domain, budget)?;
            let a = eval(a, env, domain, budget)?;
            apply(&f, a, domain, budget)
        }
        Expr::Prim(op, args) => {
            let args = args
                .iter()
                .map(|a| eval(a, env, domain, budget))
                .collect::<Result<Vec<_>, _>>()?;
            apply_prim(*op, args, domain)
        }
    }
}

/// Applies a closure value to an argument.
pub fn apply<I: Scalar>(
    f: &Value<I>,
    arg: Value<I>,
    domain: Domain,
    budget: &mut EvalBudget,
) -> Result<Value<I>, EvalError> {
    let Value::Closure(c) = f else {
        return stuck(format!("applying a non-function {f}"));
    };
    let mut env = c.env.clone();
    if let Some(name) = &c.rec_name {
        env = env.extend(name.clone(), f.clone());
    }
    eval(&c.body, &env.extend(c.param.clone(), arg), domain, budget)
}

/// Projections work on concrete tuples and, structurally, on abstract values.
pub(crate) fn project<I: Scalar>(v: Value<I>, first: bool) -> Result<Value<I>, EvalError> {
    match v {
        Value::Tuple(a, b) => Ok(if first { *a } else { *b }),
        Value::Abs(a) => Ok(Value::Abs(if first { a.fst() } else { a.snd() })),
        other => stuck(format!(
            "{} applied to {other}",
            if first { "fst" } else { "snd" }
        )),
    }
}

pub(crate) fn match_pattern<I: Scalar>(p: &Pattern<I>, v: &Value<I>) -> Option<Vec<(Name, Value<I>)>> {
    let mut out = Vec::new();
    fn go<I: Scalar>(p: &Pattern<I>, v: &Value<I>, out: &mut Vec<(Name, Value<I>)>) -> bool {
        match (p, v) {
            (Pattern::Wild, _) => true,
            (Pattern::Var(x), v) => {
                out.push((x.clone(), v.clone()));
                true
            }
            (Pattern::Int(n), Value::Int(m)) => n == m,
            (Pattern::Tuple(pa, pb), Value::Tuple(a, b)) => go(pa, a, out) && go(pb, b, out),
            (Pattern::Construct(tag, ps), Value::Construct(vtag, vs)) => {
                tag == vtag
                    && ps.len() == vs.len()
                    && ps.iter().zip(vs).all(|(p, v)| go(p, v, out))
            }
            _ => false,
        }
    }
    go(p, v, &mut out).then_some(out)
}

/// Reads a MET value as an abstract SRC value, abstracting integers.
pub fn to_abs<I: Scalar>(v: &Value<I>, domain: Domain) -> Result<AbsValue<I>, EvalError> {
    match v {
        Value::Int(n) => Ok(AbsValue::Num(domain.eta_int(n))),
        Value::Tuple(a, b) => Ok(AbsValue::pair(to_abs(a, domain)?, to_abs(b, domain)?)),
        Value::Abs(a) => Ok(a.clone()),
        other => stuck(format!("cannot abstract {other}")),
    }
}

fn int_arg<I: Scalar>(op: PrimOp, v: &Value<I>) -> Result<&I, EvalError> {
    match v {
        Value::Int(n) => Ok(n),
        other => stuck(format!("{} expects integers, got {other}", op.census_name())),
    }
}

pub(crate) fn apply_prim<I: Scalar>(
    op: PrimOp,
    args: Vec<Value<I>>,
    domain: Domain,
) -> Result<Value<I>, EvalError> {
    if args.len() != op.arity() {
        return stuck(format!(
            "{} expects {} argument(s), got {}",
            op.census_name(),
            op.arity(),
            args.len()
        ));
    }
    let abs = |i: usize| to_abs(&args[i], domain);
    Ok(match op {
        PrimOp::Add => Value::Int(int_arg(op, &args[0])?.lang_add(int_arg(op, &args[1])?)),
        PrimOp::Mul => Value::Int(int_arg(op, &args[0])?.lang_mul(int_arg(op, &args[1])?)),
        PrimOp::Eq => {
            let equal = int_arg(op, &args[0])? == int_arg(op, &args[1])?;
            Value::Int(if equal { I::one_value() } else { I::zero_value() })
        }
        PrimOp::Eta => Value::Abs(abs(0)?),
        PrimOp::AAdd => Value::Abs(AbsValue::abs_add(&abs(0)?, &abs(1)?, domain)),
        PrimOp::AMul => Value::Abs(AbsValue::abs_mul(&abs(0)?, &abs(1)?, domain)),
        PrimOp::AEq => Value::Abs(AbsValue::abs_eq(&abs(0)?, &abs(1)?, domain)),
        PrimOp::AJoin => Value::Abs(abs(0)?.join(&abs(1)?)),
        PrimOp::AFilterNe0 => Value::Abs(AbsValue::filter_nonzero(&abs(0)?, &abs(1)?)),
        PrimOp::AFilterEq0 => Value::Abs(AbsValue::filter_zero(&abs(0)?, &abs(1)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type E = Expr<BigInt>;
    type V = Value<BigInt>;

    fn int(n: i64) -> E {
        E::Int(n.into())
    }

    fn run(e: &E) -> Result<V, EvalError> {
        eval_closed(e, Domain::Interval, &mut EvalBudget::default())
    }

    #[test]
    fn arithmetic() {
        assert_eq!(run(&E::prim(PrimOp::Add, vec![int(40), int(2)])).unwrap(), V::Int(42.into()));
        assert_eq!(run(&E::prim(PrimOp::Eq, vec![int(3), int(2)])).unwrap(), V::Int(0.into()));
    }

    #[test]
    fn eta_of_zero_is_singleton() {
        let v = run(&E::prim(PrimOp::Eta, vec![int(0)])).unwrap();
        let V::Abs(a) = v else { panic!("expected abstract value") };
        assert_eq!(a, AbsValue::interval(0.into(), 0.into()));
        assert!(a.contains(&crate::src_lang::SrcValue::int(0)));
    }

    #[test]
    fn eta_is_idempotent() {
        let once = E::prim(PrimOp::Eta, vec![E::tuple(int(1), int(2))]);
        let twice = E::prim(PrimOp::Eta, vec![once.clone()]);
        assert_eq!(run(&once).unwrap(), run(&twice).unwrap());
    }

    #[test]
    fn match_first_branch_wins() {
        let e = E::matches(
            E::Construct("Add".into(), vec![int(7)]),
            vec![
                (Pattern::Construct("Add".into(), vec![Pattern::Var("n".into())]), E::var("n")),
                (Pattern::Construct("Mul".into(), vec![Pattern::Var("n".into())]), int(0)),
            ],
        );
        assert_eq!(run(&e).unwrap(), V::Int(7.into()));
    }

    #[test]
    fn stuck_cases() {
        assert!(matches!(run(&E::fst(int(1))), Err(EvalError::Stuck(_))));
        assert!(matches!(run(&E::app(int(1), int(2))), Err(EvalError::Stuck(_))));
        assert!(matches!(run(&E::var("nope")), Err(EvalError::Stuck(_))));
        let pair_sum = E::prim(PrimOp::Add, vec![E::tuple(int(1), int(1)), int(1)]);
        assert!(matches!(run(&pair_sum), Err(EvalError::Stuck(_))));
        let no_branch = E::matches(int(3), vec![(Pattern::Int(4.into()), int(0))]);
        assert!(matches!(run(&no_branch), Err(EvalError::Stuck(_))));
    }

    #[test]
    fn fuel_exhaustion_on_divergence() {
        // let rec f x = f x in f 0
        let e = E::LetRec {
            name: "f".into(),
            param: "x".into(),
            body: std::sync::Arc::new(E::app(E::var("f"), E::var("x"))),
            cont: Box::new(E::app(E::var("f"), int(0))),
        };
        let mut budget = EvalBudget::new(50_000);
        assert_eq!(
            eval_closed(&e, Domain::Sign, &mut budget),
            Err(EvalError::FuelExhausted { fuel: 50_000 })
        );
        assert_eq!(budget.steps_used, 50_000);
    }

    #[test]
    fn deep_recursion_does_not_overflow() {
        let e = E::LetRec {
            name: "f".into(),
            param: "x".into(),
            body: std::sync::Arc::new(E::app(E::var("f"), E::var("x"))),
            cont: Box::new(E::app(E::var("f"), int(0))),
        };
        let mut budget = EvalBudget::new(DEFAULT_FUEL);
        assert!(matches!(
            eval_closed(&e, Domain::Sign, &mut budget),
            Err(EvalError::FuelExhausted { .. })
        ));
    }

    #[test]
    fn abstract_projection() {
        let e = E::fst(E::prim(PrimOp::Eta, vec![E::tuple(int(1), int(2))]));
        assert_eq!(run(&e).unwrap(), V::Abs(AbsValue::interval(1.into(), 1.into())));
    }
}
