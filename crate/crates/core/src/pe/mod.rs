//! Online partial evaluator for MET.
//!
//! Values are two-level: static values are known now, dynamic ones are
//! residual expressions over the remaining input. Tuples may be partially
//! static so that projecting the static half of the input stays static.
//! Known calls are always unfolded under a fuel bound. A call repeated with
//! the same function and an equal argument reuses the first result, which
//! is bound once in the residual program.

mod simplify;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Domain;
use crate::met::{
    apply_prim, count_nodes, match_pattern, project, Closure, Expr, Name, NodeCensus, Pattern,
    PrimOp, Value,
};
use crate::scalar::Scalar;

pub use simplify::simplify;

/// Name of the parameter of every specialized program.
pub const INPUT_NAME: &str = "i";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeConfig {
    pub unfold_fuel: u64,
    pub fold_concrete_arith: bool,
    /// Requires `domain`; folded abstract values cannot be reified, so this
    /// only succeeds when they never reach residual code.
    pub fold_abstract_prims: bool,
    pub domain: Option<Domain>,
    /// Reuse the result of a repeated call instead of unfolding it again.
    pub memoize_calls: bool,
    /// First value of the fresh-name counter.
    pub name_seed: u64,
}

pub const DEFAULT_UNFOLD_FUEL: u64 = 100_000;

impl Default for PeConfig {
    fn default() -> Self {
        PeConfig {
            unfold_fuel: DEFAULT_UNFOLD_FUEL,
            fold_concrete_arith: true,
            fold_abstract_prims: false,
            domain: None,
            memoize_calls: true,
            name_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeError {
    #[error("unfolding fuel exhausted after {fuel} calls")]
    FuelExhausted { fuel: u64 },
    #[error("cannot reify {0} into residual code")]
    Reify(String),
    #[error("stuck during specialization: {0}")]
    Stuck(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Lifts a first-order value into an expression that evaluates to it.
pub fn reify<I: Scalar>(v: &Value<I>) -> Result<Expr<I>, PeError> {
    match v {
        Value::Int(n) => Ok(Expr::Int(n.clone())),
        Value::Tuple(a, b) => Ok(Expr::tuple(reify(a)?, reify(b)?)),
        Value::Construct(tag, args) => Ok(Expr::Construct(
            tag.clone(),
            args.iter().map(reify).collect::<Result<_, _>>()?,
        )),
        Value::Closure(_) => Err(PeError::Reify("a closure".into())),
        Value::Abs(a) => Err(PeError::Reify(format!("the abstract value {a}"))),
    }
}

/// Specializes `e`, a function over pairs, to the first component
/// `static_input`. The result is `fun i -> ...` over the second component.
pub fn specialize<I: Scalar>(
    e: &Expr<I>,
    static_input: &Value<I>,
    cfg: &PeConfig,
) -> Result<Expr<I>, PeError> {
    if cfg.unfold_fuel == 0 {
        return Err(PeError::Config("unfold_fuel must be positive".into()));
    }
    if cfg.fold_abstract_prims && cfg.domain.is_none() {
        return Err(PeError::Config("folding abstract primitives needs a domain".into()));
    }
    let mut pe = Pe::new(cfg);
    let f = pe.eval(e, &PeEnv::default())?;
    let body = pe.in_scope(|pe| {
        let arg = PeValue::tuple(
            PeValue::Static(static_input.clone()),
            PeValue::Dynamic(Expr::var(INPUT_NAME)),
        );
        pe.apply(f, arg)
    })?;
    let residual = Expr::lambda(INPUT_NAME, body);
    Ok(simplify(&residual, &pe.temps))
}

#[derive(Debug, Clone)]
enum PeValue<I> {
    Static(Value<I>),
    Dynamic(Expr<I>),
    /// A pair with at least one component that is not static.
    Tuple(Box<PeValue<I>>, Box<PeValue<I>>),
    Closure(PeClosure<I>),
}

#[derive(Debug, Clone)]
struct PeClosure<I> {
    rec_name: Option<Name>,
    param: Name,
    body: Arc<Expr<I>>,
    env: PeEnv<I>,
}

impl<I: PartialEq> PartialEq for PeValue<I> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PeValue::Static(a), PeValue::Static(b)) => a == b,
            (PeValue::Dynamic(a), PeValue::Dynamic(b)) => a == b,
            (PeValue::Tuple(a1, b1), PeValue::Tuple(a2, b2)) => a1 == a2 && b1 == b2,
            (PeValue::Closure(a), PeValue::Closure(b)) => {
                a.rec_name == b.rec_name
                    && a.param == b.param
                    && Arc::ptr_eq(&a.body, &b.body)
                    && a.env.id() == b.env.id()
            }
            _ => false,
        }
    }
}

impl<I: Scalar> PeValue<I> {
    fn tuple(a: PeValue<I>, b: PeValue<I>) -> Self {
        match (a, b) {
            (PeValue::Static(a), PeValue::Static(b)) => PeValue::Static(Value::tuple(a, b)),
            (a, b) => PeValue::Tuple(Box::new(a), Box::new(b)),
        }
    }
}

#[derive(Debug, Clone)]
struct PeEnv<I> {
    head: Option<Arc<PeNode<I>>>,
}

#[derive(Debug)]
struct PeNode<I> {
    name: Name,
    value: PeValue<I>,
    next: Option<Arc<PeNode<I>>>,
}

impl<I> Default for PeEnv<I> {
    fn default() -> Self {
        PeEnv { head: None }
    }
}

impl<I> PeEnv<I> {
    fn extend(&self, name: impl Into<Name>, value: PeValue<I>) -> Self {
        PeEnv {
            head: Some(Arc::new(PeNode { name: name.into(), value, next: self.head.clone() })),
        }
    }

    fn lookup(&self, name: &str) -> Option<&PeValue<I>> {
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = node.next.as_deref();
        }
        None
    }

    fn id(&self) -> usize {
        self.head.as_ref().map_or(0, |n| Arc::as_ptr(n) as usize)
    }
}

fn is_trivial<I>(e: &Expr<I>) -> bool {
    match e {
        Expr::Var(_) | Expr::Int(_) => true,
        Expr::Fst(a) | Expr::Snd(a) => is_trivial(a),
        _ => false,
    }
}

/// Residual code that gets stuck when reached.
fn stuck_expr<I: Scalar>() -> Expr<I> {
    Expr::fst(Expr::Int(I::zero_value()))
}

struct MemoEntry<I> {
    body: *const Expr<I>,
    env: usize,
    arg: PeValue<I>,
    result: PeValue<I>,
}

struct Scope<I> {
    lets: Vec<(Name, Expr<I>)>,
    memo: Vec<MemoEntry<I>>,
}

impl<I> Default for Scope<I> {
    fn default() -> Self {
        Scope { lets: Vec::new(), memo: Vec::new() }
    }
}

enum Matched<I> {
    Yes(Vec<(Name, PeValue<I>)>),
    No,
    Unknown,
}

struct Pe<'c, I> {
    cfg: &'c PeConfig,
    fuel: u64,
    counter: u64,
    scopes: Vec<Scope<I>>,
    /// Let-bound names introduced for sharing; the simplifier may inline them.
    temps: std::collections::HashSet<Name>,
}

impl<'c, I: Scalar> Pe<'c, I> {
    fn new(cfg: &'c PeConfig) -> Self {
        Pe {
            cfg,
            fuel: cfg.unfold_fuel,
            counter: cfg.name_seed,
            scopes: vec![Scope::default()],
            temps: Default::default(),
        }
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        format!("{base}_{}", self.counter)
    }

    /// Runs `f` in a fresh let scope and closes the scope around its result.
    fn in_scope(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<PeValue<I>, PeError>,
    ) -> Result<Expr<I>, PeError> {
        self.scopes.push(Scope::default());
        let result = f(self).and_then(|v| self.reify(v));
        let scope = self.scopes.pop().expect("scope pushed above");
        let body = result?;
        Ok(scope
            .lets
            .into_iter()
            .rev()
            .fold(body, |body, (x, e)| Expr::let_(x, e, body)))
    }

    /// Like [`Pe::in_scope`] for code that runs only under a dynamic
    /// condition: a static failure there becomes residual failing code.
    fn in_dynamic_scope(
        &mut self,
        f: impl FnOnce(&mut Self) -> Result<PeValue<I>, PeError>,
    ) -> Result<Expr<I>, PeError> {
        match self.in_scope(f) {
            Err(PeError::Stuck(_)) => Ok(stuck_expr()),
            other => other,
        }
    }

    fn bind(&mut self, base: &str, e: Expr<I>, temp: bool) -> Expr<I> {
        let x = self.fresh(base);
        if temp {
            self.temps.insert(x.clone());
        }
        self.scopes.last_mut().expect("a scope is open").lets.push((x.clone(), e));
        Expr::Var(x)
    }

    /// Binds nontrivial dynamic parts to variables so they can be duplicated.
    fn share(&mut self, v: PeValue<I>, base: &str, temp: bool) -> PeValue<I> {
        match v {
            PeValue::Dynamic(e) if !is_trivial(&e) => PeValue::Dynamic(self.bind(base, e, temp)),
            PeValue::Tuple(a, b) => {
                let a = self.share(*a, base, temp);
                let b = self.share(*b, base, temp);
                PeValue::tuple(a, b)
            }
            v => v,
        }
    }

    fn reify(&mut self, v: PeValue<I>) -> Result<Expr<I>, PeError> {
        match v {
            PeValue::Static(v) => reify(&v),
            PeValue::Dynamic(e) => Ok(e),
            PeValue::Tuple(a, b) => Ok(Expr::tuple(self.reify(*a)?, self.reify(*b)?)),
            PeValue::Closure(c) => {
                let param = self.fresh(&c.param);
                match &c.rec_name {
                    None => {
                        let env = c.env.extend(c.param.clone(), PeValue::Dynamic(Expr::var(&param)));
                        let body = self.in_dynamic_scope(|pe| pe.eval(&c.body, &env))?;
                        Ok(Expr::lambda(param, body))
                    }
                    Some(f) => {
                        let name = self.fresh(f);
                        let env = c
                            .env
                            .extend(f.clone(), PeValue::Dynamic(Expr::var(&name)))
                            .extend(c.param.clone(), PeValue::Dynamic(Expr::var(&param)));
                        let body = self.in_dynamic_scope(|pe| pe.eval(&c.body, &env))?;
                        Ok(Expr::LetRec {
                            name: name.clone(),
                            param,
                            body: Arc::new(body),
                            cont: Box::new(Expr::Var(name)),
                        })
                    }
                }
            }
        }
    }

    fn static_closure(c: &Closure<I>) -> PeClosure<I> {
        let env = c
            .env
            .bindings()
            .into_iter()
            .rev()
            .fold(PeEnv::default(), |env, (x, v)| env.extend(x.clone(), PeValue::Static(v.clone())));
        PeClosure { rec_name: c.rec_name.clone(), param: c.param.clone(), body: c.body.clone(), env }
    }

    fn eval(&mut self, e: &Expr<I>, env: &PeEnv<I>) -> Result<PeValue<I>, PeError> {
        stacker::maybe_grow(128 * 1024, 4 * 1024 * 1024, || self.eval_inner(e, env))
    }

    fn eval_inner(&mut self, e: &Expr<I>, env: &PeEnv<I>) -> Result<PeValue<I>, PeError> {
        match e {
            Expr::Var(x) => env
                .lookup(x)
                .cloned()
                .ok_or_else(|| PeError::Stuck(format!("unbound variable `{x}`"))),
            Expr::Int(n) => Ok(PeValue::Static(Value::Int(n.clone()))),
            Expr::Tuple(a, b) => {
                let a = self.eval(a, env)?;
                let a = self.share(a, "t", true);
                let b = self.eval(b, env)?;
                let b = self.share(b, "t", true);
                Ok(PeValue::tuple(a, b))
            }
            Expr::Fst(a) => {
                let v = self.eval(a, env)?;
                self.project(v, true)
            }
            Expr::Snd(a) => {
                let v = self.eval(a, env)?;
                self.project(v, false)
            }
            Expr::Construct(tag, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env)?);
                }
                if vals.iter().all(|v| matches!(v, PeValue::Static(_))) {
                    let vals = vals
                        .into_iter()
                        .map(|v| match v {
                            PeValue::Static(v) => v,
                            _ => unreachable!(),
                        })
                        .collect();
                    return Ok(PeValue::Static(Value::Construct(tag.clone(), vals)));
                }
                let args = vals
                    .into_iter()
                    .map(|v| self.reify(v))
                    .collect::<Result<_, _>>()?;
                Ok(PeValue::Dynamic(Expr::Construct(tag.clone(), args)))
            }
            Expr::Let(x, bound, body) => {
                let v = self.eval(bound, env)?;
                let v = self.share(v, x, false);
                self.eval(body, &env.extend(x.clone(), v))
            }
            Expr::LetRec { name, param, body, cont } => {
                let f = PeValue::Closure(PeClosure {
                    rec_name: Some(name.clone()),
                    param: param.clone(),
                    body: body.clone(),
                    env: env.clone(),
                });
                self.eval(cont, &env.extend(name.clone(), f))
            }
            Expr::Lambda(param, body) => Ok(PeValue::Closure(PeClosure {
                rec_name: None,
                param: param.clone(),
                body: body.clone(),
                env: env.clone(),
            })),
            Expr::App(f, a) => {
                let f = self.eval(f, env)?;
                let a = self.eval(a, env)?;
                self.apply(f, a)
            }
            Expr::Prim(op, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env)?);
                }
                self.prim(*op, vals)
            }
            Expr::Match(scrutinee, branches) => {
                let v = self.eval(scrutinee, env)?;
                let v = self.share(v, "m", true);
                self.match_branches(v, branches, env)
            }
        }
    }

    fn project(&mut self, v: PeValue<I>, first: bool) -> Result<PeValue<I>, PeError> {
        match v {
            PeValue::Static(v) => project(v, first)
                .map(PeValue::Static)
                .map_err(|e| PeError::Stuck(e.to_string())),
            PeValue::Tuple(a, b) => Ok(if first { *a } else { *b }),
            PeValue::Dynamic(e) => Ok(PeValue::Dynamic(if first { Expr::fst(e) } else { Expr::snd(e) })),
            PeValue::Closure(_) => Err(PeError::Stuck("projection of a function".into())),
        }
    }

    fn prim(&mut self, op: PrimOp, vals: Vec<PeValue<I>>) -> Result<PeValue<I>, PeError> {
        let fold = if op.is_abstract() {
            self.cfg.fold_abstract_prims
        } else {
            self.cfg.fold_concrete_arith
        };
        if fold && vals.iter().all(|v| matches!(v, PeValue::Static(_))) {
            let args = vals
                .into_iter()
                .map(|v| match v {
                    PeValue::Static(v) => v,
                    _ => unreachable!(),
                })
                .collect();
            let domain = self.cfg.domain.unwrap_or(Domain::Interval);
            return apply_prim(op, args, domain)
                .map(PeValue::Static)
                .map_err(|e| PeError::Stuck(e.to_string()));
        }
        let args = vals
            .into_iter()
            .map(|v| self.reify(v))
            .collect::<Result<_, _>>()?;
        Ok(PeValue::Dynamic(Expr::prim(op, args)))
    }

    fn apply(&mut self, f: PeValue<I>, arg: PeValue<I>) -> Result<PeValue<I>, PeError> {
        let c = match f {
            PeValue::Closure(c) => c,
            PeValue::Static(Value::Closure(c)) => Self::static_closure(&c),
            PeValue::Dynamic(fe) => {
                let a = self.reify(arg)?;
                return Ok(PeValue::Dynamic(Expr::app(fe, a)));
            }
            other => return Err(PeError::Stuck(format!("applying a non-function {other:?}"))),
        };
        let arg = self.share(arg, &c.param, true);
        let body_ptr = Arc::as_ptr(&c.body);
        let env_id = c.env.id();
        if self.cfg.memoize_calls {
            let hit = self.scopes.iter().rev().flat_map(|s| s.memo.iter()).find(|m| {
                m.body == body_ptr && m.env == env_id && m.arg == arg
            });
            if let Some(m) = hit {
                return Ok(m.result.clone());
            }
        }
        if self.fuel == 0 {
            return Err(PeError::FuelExhausted { fuel: self.cfg.unfold_fuel });
        }
        self.fuel -= 1;
        let mut env = c.env.clone();
        if let Some(name) = &c.rec_name {
            env = env.extend(name.clone(), PeValue::Closure(c.clone()));
        }
        let result = self.eval(&c.body, &env.extend(c.param.clone(), arg.clone()))?;
        if !self.cfg.memoize_calls {
            return Ok(result);
        }
        let base = c.rec_name.as_deref().unwrap_or("r");
        let result = self.share(result, base, true);
        self.scopes.last_mut().expect("a scope is open").memo.push(MemoEntry {
            body: body_ptr,
            env: env_id,
            arg,
            result: result.clone(),
        });
        Ok(result)
    }

    fn match_pe(p: &Pattern<I>, v: &PeValue<I>) -> Matched<I> {
        match (p, v) {
            (Pattern::Wild, _) => Matched::Yes(vec![]),
            (Pattern::Var(x), v) => Matched::Yes(vec![(x.clone(), v.clone())]),
            (_, PeValue::Static(sv)) => match match_pattern(p, sv) {
                Some(bs) => Matched::Yes(
                    bs.into_iter().map(|(x, v)| (x, PeValue::Static(v))).collect(),
                ),
                None => Matched::No,
            },
            (_, PeValue::Dynamic(_)) => Matched::Unknown,
            (Pattern::Tuple(pa, pb), PeValue::Tuple(a, b)) => {
                match (Self::match_pe(pa, a), Self::match_pe(pb, b)) {
                    (Matched::No, _) | (_, Matched::No) => Matched::No,
                    (Matched::Yes(mut x), Matched::Yes(y)) => {
                        x.extend(y);
                        Matched::Yes(x)
                    }
                    _ => Matched::Unknown,
                }
            }
            _ => Matched::No,
        }
    }

    fn match_branches(
        &mut self,
        v: PeValue<I>,
        branches: &[(Pattern<I>, Expr<I>)],
        env: &PeEnv<I>,
    ) -> Result<PeValue<I>, PeError> {
        for (i, (p, body)) in branches.iter().enumerate() {
            match Self::match_pe(p, &v) {
                Matched::Yes(bs) => {
                    let env = bs.into_iter().fold(env.clone(), |env, (x, v)| env.extend(x, v));
                    return self.eval(body, &env);
                }
                Matched::No => continue,
                Matched::Unknown => return self.residual_match(v, &branches[i..], env),
            }
        }
        Err(PeError::Stuck("no match branch applies".into()))
    }

    fn residual_match(
        &mut self,
        v: PeValue<I>,
        branches: &[(Pattern<I>, Expr<I>)],
        env: &PeEnv<I>,
    ) -> Result<PeValue<I>, PeError> {
        let scrutinee = self.reify(v.clone())?;
        let mut out = Vec::new();
        for (p, body) in branches {
            match Self::match_pe(p, &v) {
                Matched::No => continue,
                Matched::Yes(bs) => {
                    let env = bs.into_iter().fold(env.clone(), |env, (x, v)| env.extend(x, v));
                    let body = self.in_dynamic_scope(|pe| pe.eval(body, &env))?;
                    out.push((Pattern::Wild, body));
                    break;
                }
                Matched::Unknown => {
                    let mut renames = Vec::new();
                    let p = self.rename_pattern(p, &mut renames);
                    let env = renames.into_iter().fold(env.clone(), |env, (x, fresh)| {
                        env.extend(x, PeValue::Dynamic(Expr::Var(fresh)))
                    });
                    let body = self.in_dynamic_scope(|pe| pe.eval(body, &env))?;
                    out.push((p, body));
                }
            }
        }
        Ok(PeValue::Dynamic(Expr::matches(scrutinee, out)))
    }

    fn rename_pattern(&mut self, p: &Pattern<I>, renames: &mut Vec<(Name, Name)>) -> Pattern<I> {
        match p {
            Pattern::Var(x) => {
                let fresh = self.fresh(x);
                renames.push((x.clone(), fresh.clone()));
                Pattern::Var(fresh)
            }
            Pattern::Wild | Pattern::Int(_) => p.clone(),
            Pattern::Tuple(a, b) => {
                Pattern::tuple(self.rename_pattern(a, renames), self.rename_pattern(b, renames))
            }
            Pattern::Construct(tag, ps) => Pattern::Construct(
                tag.clone(),
                ps.iter().map(|p| self.rename_pattern(p, renames)).collect(),
            ),
        }
    }
}

/// Census of a residual program plus the flags used to judge specialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualStats {
    pub census: NodeCensus,
    pub has_match: bool,
    pub abstract_ops: BTreeMap<String, usize>,
    pub size: usize,
}

pub fn residual_stats<I>(e: &Expr<I>) -> ResidualStats {
    let census = count_nodes(e);
    let abstract_ops = PrimOp::ALL
        .into_iter()
        .filter(|op| op.is_abstract() && census.prim(*op) > 0)
        .map(|op| (op.census_name().to_string(), census.prim(op)))
        .collect();
    let size = ["Var", "IntLit", "Tuple", "Proj1", "Proj2", "Construct", "Match", "Let", "LetRecFun", "Lambda", "App", "Prim"]
        .iter()
        .map(|k| census.get(k))
        .sum();
    ResidualStats { has_match: census.get("Match") > 0, census, abstract_ops, size }
}

impl fmt::Display for ResidualStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {}", "nodes", self.size)?;
        writeln!(f, "{:<12} {}", "has_match", self.has_match)?;
        for (k, v) in self.census.iter() {
            writeln!(f, "{k:<12} {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::met::{apply, eval_closed, parse_met, EvalBudget};
    use num_bigint::BigInt;

    type E = Expr<BigInt>;
    type V = Value<BigInt>;

    fn int(n: i64) -> V {
        V::Int(n.into())
    }

    fn run(f: &E, arg: V) -> V {
        let mut b = EvalBudget::default();
        let fv = eval_closed(f, Domain::Interval, &mut b).unwrap();
        apply(&fv, arg, Domain::Interval, &mut b).unwrap()
    }

    #[test]
    fn sum_with_static_first() {
        let e: E = parse_met("fun x -> fst x + snd x").unwrap();
        let r = specialize(&e, &int(3), &PeConfig::default()).unwrap();
        assert_eq!(crate::met::print_met(&r), "fun i -> 3 + i");
        for y in -5..5 {
            assert_eq!(run(&r, int(y)), run(&e, V::tuple(int(3), int(y))));
        }
    }

    #[test]
    fn static_branch_selection() {
        let e: E = parse_met("fun x -> match fst x with | S(n) -> n | Z -> 0").unwrap();
        let r = specialize(&e, &V::construct("S", vec![int(7)]), &PeConfig::default()).unwrap();
        assert_eq!(count_nodes(&r).get("Match"), 0);
        assert_eq!(run(&r, int(0)), int(7));
    }

    #[test]
    fn reify_examples() {
        assert_eq!(reify(&int(3)).unwrap(), E::Int(3.into()));
        assert_eq!(
            reify(&V::tuple(int(1), int(2))).unwrap(),
            E::tuple(E::Int(1.into()), E::Int(2.into()))
        );
        let c = V::construct("Add", vec![int(7)]);
        let back = eval_closed(&reify(&c).unwrap(), Domain::Sign, &mut EvalBudget::default()).unwrap();
        assert_eq!(back, c);
        assert!(reify(&V::Abs(crate::domain::AbsValue::Top)).is_err());
    }

    #[test]
    fn dynamic_match_is_residualized() {
        let e: E = parse_met("fun x -> match snd x with | 0 -> fst x | n -> n * fst x").unwrap();
        let r = specialize(&e, &int(5), &PeConfig::default()).unwrap();
        assert_eq!(count_nodes(&r).get("Match"), 1);
        for y in -3..3 {
            assert_eq!(run(&r, int(y)), run(&e, V::tuple(int(5), int(y))));
        }
    }

    #[test]
    fn static_recursion_unfolds() {
        let e: E = parse_met(
            "fun x -> let rec pow n = match n with | 0 -> 1 | k -> snd x * pow (k + -1) in pow (fst x)",
        )
        .unwrap();
        let r = specialize(&e, &int(3), &PeConfig::default()).unwrap();
        assert_eq!(count_nodes(&r).get("Match"), 0);
        assert_eq!(run(&r, int(2)), int(8));
    }

    #[test]
    fn divergent_unfolding_hits_fuel() {
        let e: E = parse_met("fun x -> let rec f n = f (n + 1) in f (fst x)").unwrap();
        let cfg = PeConfig { unfold_fuel: 1000, ..PeConfig::default() };
        assert_eq!(specialize(&e, &int(0), &cfg), Err(PeError::FuelExhausted { fuel: 1000 }));
    }

    #[test]
    fn stuck_under_dynamic_branch_is_deferred() {
        let e: E = parse_met("fun x -> match snd x with | 0 -> fst (fst x) | _ -> fst x").unwrap();
        let r = specialize(&e, &int(4), &PeConfig::default()).unwrap();
        assert_eq!(run(&r, int(1)), int(4));
        let mut b = EvalBudget::default();
        let f = eval_closed(&r, Domain::Sign, &mut b).unwrap();
        assert!(apply(&f, int(0), Domain::Sign, &mut b).is_err());
    }

    #[test]
    fn escaping_closures_are_residualized() {
        let e: E = parse_met("fun x -> let k = fst x in fun y -> k + y + snd x").unwrap();
        let r = specialize(&e, &int(10), &PeConfig::default()).unwrap();
        let g = run(&r, int(1));
        let mut b = EvalBudget::default();
        assert_eq!(apply(&g, int(5), Domain::Sign, &mut b).unwrap(), int(16));
    }
}
