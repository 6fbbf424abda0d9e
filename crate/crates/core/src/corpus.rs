//! MET programs used to exercise the partial evaluator.
//!
//! Every entry is a function over a pair `(static, dynamic)`. Recursion in
//! these programs is driven by the static half so that unfolding terminates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::analyzer::ABSTRACT_INTERPRETER_TEXT;
use crate::met::{parse_met, Expr, Value};
use crate::scalar::Scalar;
use crate::src_lang::{embed_src_expr, embed_src_value, gen_src_case};
use crate::tgt::{encode_input, gen_tgt_program, interpreter_fixture, Target};

/// Concrete SRC interpreter over (embedded program, embedded input).
pub const SRC_INTERPRETER_TEXT: &str = "\
let rec ev p =
  match fst p with
  | X -> snd p
  | Num(n) -> n
  | Add(a, b) -> ev (a, snd p) + ev (b, snd p)
  | Mul(a, b) -> ev (a, snd p) * ev (b, snd p)
  | Eq(a, b) -> ev (a, snd p) = ev (b, snd p)
  | Pair(a, b) -> (ev (a, snd p), ev (b, snd p))
  | Fst(a) -> fst (ev (a, snd p))
  | Snd(a) -> snd (ev (a, snd p))
  | If(c, t, f) ->
      (match ev (c, snd p) with
       | 0 -> ev (f, snd p)
       | _ -> ev (t, snd p))
in
fun x -> ev x
";

const POWER: &str = "\
fun x ->
  let rec pow n = match n with | 0 -> 1 | k -> snd x * pow (k + -1) in
  pow (fst x)
";

const HORNER: &str = "\
fun x ->
  let rec h l = match l with | Nil -> 0 | Cons(c, r) -> c + snd x * h r in
  h (fst x)
";

const PEANO_ADD: &str = "\
fun x ->
  let rec add n = match n with | Z -> snd x | S(m) -> 1 + add m in
  add (fst x)
";

const DOT: &str = "\
fun x ->
  let rec dot p =
    match p with
    | (Nil, _) -> 0
    | (Cons(a, r), ys) -> a * fst ys + dot (r, snd ys)
  in
  dot x
";

const SELECT: &str = "\
fun x ->
  match fst x with
  | 0 -> snd x
  | n -> (match snd x with | 0 -> n | m -> (n * m, m = n))
";

const CLOSURES: &str = "\
fun x ->
  let k = fst x in
  let f = fun y -> y * k + snd x in
  (f (f 1), f k)
";

const MAP: &str = "\
fun x ->
  let rec map f = fun l ->
    match l with
    | Nil -> Nil
    | Cons(h, t) -> Cons(f h, map f t)
  in
  map (fun v -> v * v + snd x) (fst x)
";

/// Draws a `(static, dynamic)` argument pair.
pub type CaseGen<I> = fn(&mut ChaCha8Rng) -> (Value<I>, Value<I>);

pub struct CorpusEntry<I> {
    pub name: &'static str,
    pub program: Expr<I>,
    pub gen: CaseGen<I>,
}

fn int<I: Scalar>(rng: &mut ChaCha8Rng, m: i64) -> Value<I> {
    Value::Int(I::from_i64_wrapping(rng.gen_range(-m..=m)))
}

fn int_list<I: Scalar>(rng: &mut ChaCha8Rng, len: usize, m: i64) -> Value<I> {
    (0..len).fold(Value::construct("Nil", vec![]), |l, _| {
        Value::construct("Cons", vec![int(rng, m), l])
    })
}

fn gen_power<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    (Value::Int(I::from_i64_wrapping(rng.gen_range(0..8))), int(rng, 10))
}

fn gen_horner<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    let len = rng.gen_range(0..6);
    (int_list(rng, len, 20), int(rng, 10))
}

fn gen_peano<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    let n = rng.gen_range(0..10);
    let nat = (0..n).fold(Value::construct("Z", vec![]), |v, _| Value::construct("S", vec![v]));
    (nat, int(rng, 100))
}

fn gen_dot<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    let len = rng.gen_range(0..6);
    let xs = int_list(rng, len, 20);
    let mut ys = int(rng, 5);
    for _ in 0..len {
        ys = Value::tuple(int(rng, 20), ys);
    }
    (xs, ys)
}

fn gen_small_pair<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    (int(rng, 3), int(rng, 3))
}

fn gen_map<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    let len = rng.gen_range(0..6);
    (int_list(rng, len, 20), int(rng, 50))
}

fn gen_src<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    let (e, v) = gen_src_case::<I>(rng, 4, 20);
    (embed_src_expr(&e), embed_src_value(&v))
}

fn gen_tgt<I: Scalar>(rng: &mut ChaCha8Rng, target: Target) -> (Value<I>, Value<I>) {
    let p = gen_tgt_program::<I>(rng, target, 100);
    let i = I::from_i64_wrapping(rng.gen_range(-1000..=1000));
    (embed_src_expr(&interpreter_fixture(target)), embed_src_value(&encode_input(&p, &i)))
}

fn gen_tgt_single<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    gen_tgt(rng, Target::Single)
}

fn gen_tgt_seq2<I: Scalar>(rng: &mut ChaCha8Rng) -> (Value<I>, Value<I>) {
    gen_tgt(rng, Target::Seq2)
}

pub fn corpus<I: Scalar>() -> Vec<CorpusEntry<I>> {
    let entries: [(&'static str, &str, CaseGen<I>); 13] = [
        ("power", POWER, gen_power::<I>),
        ("horner", HORNER, gen_horner::<I>),
        ("peano_add", PEANO_ADD, gen_peano::<I>),
        ("dot", DOT, gen_dot::<I>),
        ("select", SELECT, gen_small_pair::<I>),
        ("closures", CLOSURES, gen_small_pair::<I>),
        ("map", MAP, gen_map::<I>),
        ("src_interp", SRC_INTERPRETER_TEXT, gen_src::<I>),
        ("src_interp_single", SRC_INTERPRETER_TEXT, gen_tgt_single::<I>),
        ("src_interp_seq2", SRC_INTERPRETER_TEXT, gen_tgt_seq2::<I>),
        ("abstract_interp", ABSTRACT_INTERPRETER_TEXT, gen_src::<I>),
        ("abstract_interp_single", ABSTRACT_INTERPRETER_TEXT, gen_tgt_single::<I>),
        ("abstract_interp_seq2", ABSTRACT_INTERPRETER_TEXT, gen_tgt_seq2::<I>),
    ];
    entries
        .into_iter()
        .map(|(name, text, gen)| CorpusEntry {
            name,
            program: parse_met(text).unwrap_or_else(|e| panic!("corpus program {name}: {e}")),
            gen,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::met::{apply, eval_closed, EvalBudget};
    use num_bigint::BigInt;
    use rand::SeedableRng;

    #[test]
    fn all_parse() {
        assert_eq!(corpus::<BigInt>().len(), 13);
    }

    #[test]
    fn src_interpreter_examples() {
        let e: Expr<BigInt> = parse_met(SRC_INTERPRETER_TEXT).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (p, v) = gen_src_case::<BigInt>(&mut rng, 4, 20);
            let Ok(expected) = crate::src_lang::eval_src(&p, &v) else { continue };
            let mut b = EvalBudget::default();
            let f = eval_closed(&e, Domain::Sign, &mut b).unwrap();
            let arg = Value::tuple(embed_src_expr(&p), embed_src_value(&v));
            assert_eq!(apply(&f, arg, Domain::Sign, &mut b).unwrap(), embed_src_value(&expected));
        }
    }
}
