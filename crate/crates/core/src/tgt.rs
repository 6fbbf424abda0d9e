//! TGT: programs of one or two `add n` / `mul n` instructions over integer
//! input, their SRC encodings, and the SRC interpreters for them.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::src_lang::{SrcExpr, SrcValue};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TgtInstr<I> {
    Add(I),
    Mul(I),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TgtProgram<I> {
    Single(TgtInstr<I>),
    /// Runs the first instruction, then the second on its result.
    Seq2(TgtInstr<I>, TgtInstr<I>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Single,
    Seq2,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Single, Target::Seq2];

    pub fn name(self) -> &'static str {
        match self {
            Target::Single => "single",
            Target::Seq2 => "seq2",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Target::Single),
            "seq2" => Ok(Target::Seq2),
            other => Err(format!("unknown target `{other}` (expected single or seq2)")),
        }
    }
}

impl<I: Scalar> TgtInstr<I> {
    pub fn run(&self, v: &I) -> I {
        match self {
            TgtInstr::Add(n) => n.lang_add(v),
            TgtInstr::Mul(n) => n.lang_mul(v),
        }
    }

    pub fn opcode(&self) -> i64 {
        match self {
            TgtInstr::Add(_) => 0,
            TgtInstr::Mul(_) => 1,
        }
    }

    pub fn operand(&self) -> &I {
        match self {
            TgtInstr::Add(n) | TgtInstr::Mul(n) => n,
        }
    }
}

impl<I> TgtProgram<I> {
    pub fn target(&self) -> Target {
        match self {
            TgtProgram::Single(_) => Target::Single,
            TgtProgram::Seq2(..) => Target::Seq2,
        }
    }
}

pub fn eval_tgt<I: Scalar>(p: &TgtProgram<I>, input: &I) -> I {
    match p {
        TgtProgram::Single(a) => a.run(input),
        TgtProgram::Seq2(a, b) => b.run(&a.run(input)),
    }
}

fn encode_instr<I: Scalar>(instr: &TgtInstr<I>) -> SrcValue<I> {
    SrcValue::pair(SrcValue::int(instr.opcode()), SrcValue::Int(instr.operand().clone()))
}

pub fn encode_tgt_program<I: Scalar>(p: &TgtProgram<I>) -> SrcValue<I> {
    match p {
        TgtProgram::Single(a) => encode_instr(a),
        TgtProgram::Seq2(a, b) => SrcValue::pair(encode_instr(a), encode_instr(b)),
    }
}

pub fn encode_tgt_value<I: Scalar>(v: &I) -> SrcValue<I> {
    SrcValue::Int(v.clone())
}

/// The SRC input the interpreter fixtures expect: `(enc p, enc i)`.
pub fn encode_input<I: Scalar>(p: &TgtProgram<I>, i: &I) -> SrcValue<I> {
    SrcValue::pair(encode_tgt_program(p), encode_tgt_value(i))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot decode {found} as a {what}")]
pub struct DecodeError {
    pub what: String,
    pub found: String,
}

fn decode_instr<I: Scalar>(v: &SrcValue<I>) -> Result<TgtInstr<I>, DecodeError> {
    let err = || DecodeError { what: "TGT instruction".into(), found: v.to_string() };
    let SrcValue::Pair(op, n) = v else { return Err(err()) };
    let (SrcValue::Int(op), SrcValue::Int(n)) = (&**op, &**n) else { return Err(err()) };
    if op.is_zero() {
        Ok(TgtInstr::Add(n.clone()))
    } else if op.is_one() {
        Ok(TgtInstr::Mul(n.clone()))
    } else {
        Err(err())
    }
}

pub fn decode_program<I: Scalar>(v: &SrcValue<I>, target: Target) -> Result<TgtProgram<I>, DecodeError> {
    match target {
        Target::Single => decode_instr(v).map(TgtProgram::Single),
        Target::Seq2 => match v {
            SrcValue::Pair(a, b) => Ok(TgtProgram::Seq2(decode_instr(a)?, decode_instr(b)?)),
            _ => Err(DecodeError { what: "two-instruction TGT program".into(), found: v.to_string() }),
        },
    }
}

pub fn decode_value<I: Scalar>(v: &SrcValue<I>) -> Result<I, DecodeError> {
    match v {
        SrcValue::Int(n) => Ok(n.clone()),
        _ => Err(DecodeError { what: "TGT value".into(), found: v.to_string() }),
    }
}

/// One instruction step: the opcode selects `+` or `*` of the operand with
/// `val`.
fn step<I: Scalar>(instr: SrcExpr<I>, val: SrcExpr<I>) -> SrcExpr<I> {
    let zero = SrcExpr::Num(I::zero_value());
    SrcExpr::if_(
        SrcExpr::eq(SrcExpr::fst(instr.clone()), zero),
        SrcExpr::add(SrcExpr::snd(instr.clone()), val.clone()),
        SrcExpr::mul(SrcExpr::snd(instr), val),
    )
}

/// The SRC program interpreting encoded TGT programs of `target`. Its input
/// is `(enc p, enc i)`. The two-step version repeats the first step inline,
/// since SRC has no `let`.
pub fn interpreter_fixture<I: Scalar>(target: Target) -> SrcExpr<I> {
    let prog = SrcExpr::fst(SrcExpr::X);
    let input = SrcExpr::snd(SrcExpr::X);
    match target {
        Target::Single => step(prog, input),
        Target::Seq2 => {
            let first = step(SrcExpr::fst(prog.clone()), input);
            step(SrcExpr::snd(prog), first)
        }
    }
}

impl<I: Scalar> fmt::Display for TgtInstr<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TgtInstr::Add(n) => write!(f, "add {n}"),
            TgtInstr::Mul(n) => write!(f, "mul {n}"),
        }
    }
}

impl<I: Scalar> fmt::Display for TgtProgram<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TgtProgram::Single(a) => write!(f, "{a}"),
            TgtProgram::Seq2(a, b) => write!(f, "{a} ; {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid TGT program: {0}")]
pub struct TgtParseError(pub String);

fn parse_instr<I: Scalar>(text: &str) -> Result<TgtInstr<I>, TgtParseError> {
    let mut words = text.split_whitespace();
    let (Some(op), Some(n), None) = (words.next(), words.next(), words.next()) else {
        return Err(TgtParseError(format!("expected `add <int>` or `mul <int>`, got `{}`", text.trim())));
    };
    let n = n
        .parse::<I>()
        .map_err(|_| TgtParseError(format!("`{n}` is not an integer in range")))?;
    match op {
        "add" => Ok(TgtInstr::Add(n)),
        "mul" => Ok(TgtInstr::Mul(n)),
        other => Err(TgtParseError(format!("unknown instruction `{other}`"))),
    }
}

pub fn parse_tgt<I: Scalar>(text: &str) -> Result<TgtProgram<I>, TgtParseError> {
    let parts: Vec<&str> = text.split(';').collect();
    match parts[..] {
        [a] => Ok(TgtProgram::Single(parse_instr(a)?)),
        [a, b] => Ok(TgtProgram::Seq2(parse_instr(a)?, parse_instr(b)?)),
        _ => Err(TgtParseError("at most two instructions are supported".into())),
    }
}

pub fn gen_tgt_instr<I: Scalar>(rng: &mut impl Rng, magnitude: i64) -> TgtInstr<I> {
    let n = I::from_i64_wrapping(rng.gen_range(-magnitude..=magnitude));
    if rng.gen_bool(0.5) {
        TgtInstr::Add(n)
    } else {
        TgtInstr::Mul(n)
    }
}

pub fn gen_tgt_program<I: Scalar>(rng: &mut impl Rng, target: Target, magnitude: i64) -> TgtProgram<I> {
    match target {
        Target::Single => TgtProgram::Single(gen_tgt_instr(rng, magnitude)),
        Target::Seq2 => TgtProgram::Seq2(gen_tgt_instr(rng, magnitude), gen_tgt_instr(rng, magnitude)),
    }
}

/// Integers near the representable extremes (or near 2^63 and beyond when
/// the scalar is unbounded), mixed with small values.
pub fn gen_extreme_int<I: Scalar>(rng: &mut impl Rng) -> I {
    let one = I::one_value();
    let (lo, hi) = I::bounds().unwrap_or_else(|| {
        let big = I::from_i64_wrapping(i64::MAX);
        (-big.lang_mul(&big), big.lang_mul(&big))
    });
    let candidates = [
        lo.clone(),
        lo.lang_add(&one),
        hi.clone(),
        hi.lang_add(&-one.clone()),
        I::from_i64_wrapping(i64::MIN),
        I::from_i64_wrapping(i64::MAX),
        I::from_i64_wrapping(i32::MAX as i64 + 1),
        I::zero_value(),
        one.clone(),
        -one,
        I::from_i64_wrapping(rng.gen()),
    ];
    candidates[rng.gen_range(0..candidates.len())].clone()
}

fn gen_extreme_instr<I: Scalar>(rng: &mut impl Rng) -> TgtInstr<I> {
    let n = gen_extreme_int(rng);
    if rng.gen_bool(0.5) {
        TgtInstr::Add(n)
    } else {
        TgtInstr::Mul(n)
    }
}

pub fn gen_extreme_program<I: Scalar>(rng: &mut impl Rng, target: Target) -> TgtProgram<I> {
    match target {
        Target::Single => TgtProgram::Single(gen_extreme_instr(rng)),
        Target::Seq2 => TgtProgram::Seq2(gen_extreme_instr(rng), gen_extreme_instr(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::src_lang::eval_src;
    use num_bigint::BigInt;

    type P = TgtProgram<BigInt>;

    fn n(v: i64) -> BigInt {
        v.into()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_tgt(&P::Single(TgtInstr::Add(n(42))), &n(5)), n(47));
        assert_eq!(eval_tgt(&P::Single(TgtInstr::Mul(n(42))), &n(0)), n(0));
        assert_eq!(eval_tgt(&P::Seq2(TgtInstr::Add(n(1)), TgtInstr::Mul(n(3))), &n(4)), n(15));
    }

    #[test]
    fn encodings() {
        let add42 = P::Single(TgtInstr::Add(n(42)));
        assert_eq!(encode_tgt_program(&add42).to_string(), "(pair 0 42)");
        assert_eq!(encode_tgt_program(&P::Single(TgtInstr::Mul(n(7)))).to_string(), "(pair 1 7)");
        let seq = P::Seq2(TgtInstr::Add(n(1)), TgtInstr::Mul(n(3)));
        assert_eq!(encode_tgt_program(&seq).to_string(), "(pair (pair 0 1) (pair 1 3))");
        assert_eq!(decode_program(&encode_tgt_program(&seq), Target::Seq2).unwrap(), seq);
        assert_eq!(decode_value(&encode_tgt_value(&n(-3))).unwrap(), n(-3));
    }

    #[test]
    fn decode_rejects_unknown_opcode() {
        let v = SrcValue::pair(SrcValue::int(2), SrcValue::int(1));
        assert!(decode_program::<BigInt>(&v, Target::Single).is_err());
        assert!(decode_program::<BigInt>(&SrcValue::int(0), Target::Single).is_err());
        assert!(decode_value::<BigInt>(&v).is_err());
        assert_eq!(decode_value::<BigInt>(&SrcValue::int(9)).unwrap(), n(9));
    }

    #[test]
    fn fixtures_interpret_examples() {
        let single = interpreter_fixture::<BigInt>(Target::Single);
        assert_eq!(
            single.to_string(),
            "(if (= (fst (fst x)) 0) (+ (snd (fst x)) (snd x)) (* (snd (fst x)) (snd x)))"
        );
        let add42 = P::Single(TgtInstr::Add(n(42)));
        assert_eq!(eval_src(&single, &encode_input(&add42, &n(5))).unwrap(), SrcValue::int(47));
        let mul42 = P::Single(TgtInstr::Mul(n(42)));
        assert_eq!(eval_src(&single, &encode_input(&mul42, &n(0))).unwrap(), SrcValue::int(0));
        let seq = P::Seq2(TgtInstr::Add(n(1)), TgtInstr::Mul(n(3)));
        let seq2 = interpreter_fixture::<BigInt>(Target::Seq2);
        assert_eq!(eval_src(&seq2, &encode_input(&seq, &n(4))).unwrap(), SrcValue::int(15));
    }

    #[test]
    fn text_round_trip() {
        for s in ["add 42", "mul -3", "add 1 ; mul 3"] {
            let p: P = parse_tgt(s).unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!(parse_tgt::<BigInt>("  mul   7 \n").unwrap(), P::Single(TgtInstr::Mul(n(7))));
        for bad in ["", "add", "sub 1", "add x", "add 1 ; add 2 ; add 3", "add 1 2"] {
            assert!(parse_tgt::<BigInt>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn fixed_width_wraps_consistently() {
        let p = TgtProgram::Single(TgtInstr::Add(i8::MAX));
        assert_eq!(eval_tgt(&p, &1), i8::MIN);
        let fixture = interpreter_fixture::<i8>(Target::Single);
        assert_eq!(eval_src(&fixture, &encode_input(&p, &1)).unwrap(), SrcValue::Int(i8::MIN));
    }
}
