//! The abstract SRC interpreter as a MET program, and meta-level analysis.

use crate::domain::{AbsValue, Domain};
use crate::met::{apply, eval_closed, parse_met_with, to_abs, EvalBudget, EvalError, Expr, Signature, Value};
use crate::scalar::Scalar;
use crate::src_lang::{embed_src_expr, embed_src_value, SrcExpr, SrcValue};

/// MET text of the abstract interpreter. Its argument is the pair
/// (embedded SRC program, SRC input).
pub const ABSTRACT_INTERPRETER_TEXT: &str = "\
let rec eval p =
  match fst p with
  | X -> snd p
  | Num(n) -> eta(n)
  | Add(a, b) -> aadd(eval (a, snd p), eval (b, snd p))
  | Mul(a, b) -> amul(eval (a, snd p), eval (b, snd p))
  | Eq(a, b) -> aeq(eval (a, snd p), eval (b, snd p))
  | Pair(a, b) -> (eval (a, snd p), eval (b, snd p))
  | Fst(a) -> fst (eval (a, snd p))
  | Snd(a) -> snd (eval (a, snd p))
  | If(c, t, f) ->
      let pa = eval (c, snd p) in
      ajoin(fne0(pa, eval (t, snd p)), feq0(pa, eval (f, snd p)))
in
fun input -> let ia = eta(snd input) in eval (fst input, ia)
";

pub fn build_abstract_interpreter<I: Scalar>() -> Expr<I> {
    parse_met_with(ABSTRACT_INTERPRETER_TEXT, &Signature::src())
        .expect("the abstract interpreter text is well formed")
}

/// Runs the abstract interpreter on `(embed program, input)` where the
/// input may already contain abstract values.
pub fn analyze_meta_value<I: Scalar>(
    domain: Domain,
    program: &SrcExpr<I>,
    input: Value<I>,
    budget: &mut EvalBudget,
) -> Result<AbsValue<I>, EvalError> {
    let interp = eval_closed(&build_abstract_interpreter(), domain, budget)?;
    let arg = Value::tuple(embed_src_expr(program), input);
    let out = apply(&interp, arg, domain, budget)?;
    to_abs(&out, domain)
}

pub fn analyze_meta<I: Scalar>(
    domain: Domain,
    program: &SrcExpr<I>,
    input: &SrcValue<I>,
    budget: &mut EvalBudget,
) -> Result<AbsValue<I>, EvalError> {
    analyze_meta_value(domain, program, embed_src_value(input), budget)
}

pub fn analyze_meta_abstract<I: Scalar>(
    domain: Domain,
    program: &SrcExpr<I>,
    input: &AbsValue<I>,
    budget: &mut EvalBudget,
) -> Result<AbsValue<I>, EvalError> {
    analyze_meta_value(domain, program, Value::Abs(input.clone()), budget)
}
