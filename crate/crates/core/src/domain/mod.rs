//! Structured abstract values over a parameterizable numeric domain.
//!
//! [`AbsValue`] keeps the tuple structure of SRC values and abstracts only
//! the integers at the leaves. Bottom and top live at this level, so each
//! numeric domain only has to describe nonempty sets of integers.

mod interval;
mod sign;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::src_lang::SrcValue;

pub use interval::{Bound, Interval, IntervalDomain};
pub use sign::{SignDomain, SignSet};
pub use text::{parse_abs_value, AbsParseError};

/// Operations a base abstraction of integers has to provide.
pub trait NumericDomain<I: Scalar> {
    type Elem: Clone + PartialEq + fmt::Debug;

    /// Most precise description of a single integer.
    fn eta_int(&self, n: &I) -> Self::Elem;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn contains(&self, a: &Self::Elem, n: &I) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Abstraction of the 0/1 result of integer equality.
    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn may_be_nonzero(&self, a: &Self::Elem) -> bool;
    fn may_be_zero(&self, a: &Self::Elem) -> bool;
    fn top(&self) -> Self::Elem;
}

/// Runtime choice of numeric domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Sign,
    Interval,
}

impl Domain {
    pub const ALL: [Domain; 2] = [Domain::Sign, Domain::Interval];

    pub fn name(self) -> &'static str {
        match self {
            Domain::Sign => "sign",
            Domain::Interval => "interval",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sign" => Ok(Domain::Sign),
            "interval" => Ok(Domain::Interval),
            other => Err(format!("unknown domain `{other}` (expected sign or interval)")),
        }
    }
}

/// A nonempty abstract set of integers in one of the shipped domains.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NumAbs<I> {
    Sign(SignSet),
    Interval(Interval<I>),
}

impl<I: Scalar> NumAbs<I> {
    pub fn contains(&self, n: &I) -> bool {
        match self {
            NumAbs::Sign(s) => s.contains(n),
            NumAbs::Interval(i) => i.contains(n),
        }
    }

    pub fn may_be_zero(&self) -> bool {
        match self {
            NumAbs::Sign(s) => SignDomain::<I>::new().may_be_zero(s),
            NumAbs::Interval(i) => IntervalDomain::new().may_be_zero(i),
        }
    }

    pub fn may_be_nonzero(&self) -> bool {
        match self {
            NumAbs::Sign(s) => SignDomain::<I>::new().may_be_nonzero(s),
            NumAbs::Interval(i) => IntervalDomain::new().may_be_nonzero(i),
        }
    }

    fn as_sign(&self) -> SignSet {
        match self {
            NumAbs::Sign(s) => *s,
            NumAbs::Interval(i) => {
                let zero = Bound::Fin(I::zero_value());
                let bits = (u8::from(*i.lo() < zero) * SignSet::NEG.bits())
                    | (u8::from(i.contains(&I::zero_value())) * SignSet::ZERO.bits())
                    | (u8::from(*i.hi() > zero) * SignSet::POS.bits());
                SignSet::from_bits(bits).expect("intervals are nonempty")
            }
        }
    }

    fn as_interval(&self) -> Interval<I> {
        match self {
            NumAbs::Interval(i) => i.clone(),
            NumAbs::Sign(s) => {
                let one = I::one_value();
                let zero = I::zero_value();
                let parts = [
                    s.has_neg().then(|| Interval::new(Bound::NegInf, Bound::Fin(-one.clone()))),
                    s.has_zero().then(|| Some(Interval::singleton(zero))),
                    s.has_pos().then(|| Interval::new(Bound::Fin(one), Bound::PosInf)),
                ];
                parts
                    .into_iter()
                    .flatten()
                    .flatten()
                    .reduce(|a, b| a.hull(&b))
                    .unwrap_or_else(Interval::top)
            }
        }
    }

    /// Order within a kind; across kinds, the left operand is coerced to the
    /// right's kind (an over-approximation, so the result stays sound).
    pub fn leq(&self, other: &Self) -> bool {
        match (self, other) {
            (NumAbs::Sign(a), NumAbs::Sign(b)) => a.is_subset(*b),
            (NumAbs::Interval(a), NumAbs::Interval(b)) => a.is_subset(b),
            (a, NumAbs::Sign(b)) => a.as_sign().is_subset(*b),
            (a, NumAbs::Interval(b)) => a.as_interval().is_subset(b),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        match (self, other) {
            (NumAbs::Sign(a), NumAbs::Sign(b)) => NumAbs::Sign(a.union(*b)),
            (a, b) => NumAbs::Interval(a.as_interval().hull(&b.as_interval())),
        }
    }
}

impl<I: Scalar> fmt::Display for NumAbs<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumAbs::Sign(s) => write!(f, "{s}"),
            NumAbs::Interval(i) => write!(f, "{i}"),
        }
    }
}

impl Domain {
    pub fn eta_int<I: Scalar>(self, n: &I) -> NumAbs<I> {
        match self {
            Domain::Sign => NumAbs::Sign(SignDomain::new().eta_int(n)),
            Domain::Interval => NumAbs::Interval(IntervalDomain::new().eta_int(n)),
        }
    }

    pub fn top<I: Scalar>(self) -> NumAbs<I> {
        match self {
            Domain::Sign => NumAbs::Sign(SignSet::TOP),
            Domain::Interval => NumAbs::Interval(Interval::top()),
        }
    }

    fn num_binop<I: Scalar>(
        self,
        a: &NumAbs<I>,
        b: &NumAbs<I>,
        sign: impl Fn(&SignDomain<I>, &SignSet, &SignSet) -> SignSet,
        interval: impl Fn(&IntervalDomain<I>, &Interval<I>, &Interval<I>) -> Interval<I>,
    ) -> NumAbs<I> {
        match self {
            Domain::Sign => NumAbs::Sign(sign(&SignDomain::new(), &a.as_sign(), &b.as_sign())),
            Domain::Interval => NumAbs::Interval(interval(
                &IntervalDomain::new(),
                &a.as_interval(),
                &b.as_interval(),
            )),
        }
    }

    pub fn num_add<I: Scalar>(self, a: &NumAbs<I>, b: &NumAbs<I>) -> NumAbs<I> {
        self.num_binop(a, b, |d, x, y| d.add(x, y), |d, x, y| d.add(x, y))
    }

    pub fn num_mul<I: Scalar>(self, a: &NumAbs<I>, b: &NumAbs<I>) -> NumAbs<I> {
        self.num_binop(a, b, |d, x, y| d.mul(x, y), |d, x, y| d.mul(x, y))
    }

    pub fn num_eq<I: Scalar>(self, a: &NumAbs<I>, b: &NumAbs<I>) -> NumAbs<I> {
        self.num_binop(a, b, |d, x, y| d.eq(x, y), |d, x, y| d.eq(x, y))
    }

    /// Abstraction of `{0, 1}`, the range of equality.
    pub fn boolean<I: Scalar>(self) -> NumAbs<I> {
        self.eta_int(&I::zero_value()).join(&self.eta_int(&I::one_value()))
    }
}

/// Abstract SRC value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AbsValue<I> {
    Bot,
    Num(NumAbs<I>),
    Pair(Box<AbsValue<I>>, Box<AbsValue<I>>),
    Top,
}

impl<I: Scalar> AbsValue<I> {
    /// A pair with a bottom component is bottom.
    pub fn pair(a: AbsValue<I>, b: AbsValue<I>) -> Self {
        if a == AbsValue::Bot || b == AbsValue::Bot {
            AbsValue::Bot
        } else {
            AbsValue::Pair(Box::new(a), Box::new(b))
        }
    }

    pub fn interval(lo: I, hi: I) -> Self {
        AbsValue::Num(NumAbs::Interval(
            Interval::finite(lo, hi).expect("interval bounds out of order"),
        ))
    }

    pub fn sign(s: SignSet) -> Self {
        AbsValue::Num(NumAbs::Sign(s))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, AbsValue::Bot)
    }

    /// Structural extraction: the most precise description of `v`.
    pub fn eta(v: &SrcValue<I>, d: Domain) -> Self {
        match v {
            SrcValue::Int(n) => AbsValue::Num(d.eta_int(n)),
            SrcValue::Pair(a, b) => AbsValue::pair(Self::eta(a, d), Self::eta(b, d)),
        }
    }

    /// Concretization membership.
    pub fn contains(&self, v: &SrcValue<I>) -> bool {
        match (self, v) {
            (AbsValue::Bot, _) => false,
            (AbsValue::Top, _) => true,
            (AbsValue::Num(a), SrcValue::Int(n)) => a.contains(n),
            (AbsValue::Pair(a, b), SrcValue::Pair(x, y)) => a.contains(x) && b.contains(y),
            _ => false,
        }
    }

    pub fn leq(&self, other: &Self) -> bool {
        match (self, other) {
            (AbsValue::Bot, _) | (_, AbsValue::Top) => true,
            (AbsValue::Num(a), AbsValue::Num(b)) => a.leq(b),
            (AbsValue::Pair(a1, b1), AbsValue::Pair(a2, b2)) => a1.leq(a2) && b1.leq(b2),
            _ => false,
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        match (self, other) {
            (AbsValue::Bot, x) | (x, AbsValue::Bot) => x.clone(),
            (AbsValue::Top, _) | (_, AbsValue::Top) => AbsValue::Top,
            (AbsValue::Num(a), AbsValue::Num(b)) => AbsValue::Num(a.join(b)),
            (AbsValue::Pair(a1, b1), AbsValue::Pair(a2, b2)) => {
                AbsValue::pair(a1.join(a2), b1.join(b2))
            }
            _ => AbsValue::Top,
        }
    }

    fn arith(
        a: &Self,
        b: &Self,
        on_num: impl Fn(&NumAbs<I>, &NumAbs<I>) -> NumAbs<I>,
        fallback: NumAbs<I>,
    ) -> Self {
        match (a, b) {
            (AbsValue::Bot, _) | (_, AbsValue::Bot) => AbsValue::Bot,
            (AbsValue::Num(x), AbsValue::Num(y)) => AbsValue::Num(on_num(x, y)),
            // The concrete operator is only defined on integers, so every
            // defined outcome is covered by the fallback.
            _ => AbsValue::Num(fallback),
        }
    }

    pub fn abs_add(a: &Self, b: &Self, d: Domain) -> Self {
        Self::arith(a, b, |x, y| d.num_add(x, y), d.top())
    }

    pub fn abs_mul(a: &Self, b: &Self, d: Domain) -> Self {
        Self::arith(a, b, |x, y| d.num_mul(x, y), d.top())
    }

    pub fn abs_eq(a: &Self, b: &Self, d: Domain) -> Self {
        Self::arith(a, b, |x, y| d.num_eq(x, y), d.boolean())
    }

    /// `v` if the predicate `p` may be nonzero, bottom otherwise.
    pub fn filter_nonzero(p: &Self, v: &Self) -> Self {
        let keep = match p {
            AbsValue::Top => true,
            AbsValue::Num(n) => n.may_be_nonzero(),
            AbsValue::Bot | AbsValue::Pair(..) => false,
        };
        if keep {
            v.clone()
        } else {
            AbsValue::Bot
        }
    }

    /// `v` if the predicate `p` may be zero, bottom otherwise.
    pub fn filter_zero(p: &Self, v: &Self) -> Self {
        let keep = match p {
            AbsValue::Top => true,
            AbsValue::Num(n) => n.may_be_zero(),
            AbsValue::Bot | AbsValue::Pair(..) => false,
        };
        if keep {
            v.clone()
        } else {
            AbsValue::Bot
        }
    }

    /// First projection; a number has no components, so it projects to bottom.
    pub fn fst(&self) -> Self {
        match self {
            AbsValue::Pair(a, _) => (**a).clone(),
            AbsValue::Top => AbsValue::Top,
            AbsValue::Bot | AbsValue::Num(_) => AbsValue::Bot,
        }
    }

    pub fn snd(&self) -> Self {
        match self {
            AbsValue::Pair(_, b) => (**b).clone(),
            AbsValue::Top => AbsValue::Top,
            AbsValue::Bot | AbsValue::Num(_) => AbsValue::Bot,
        }
    }
}

impl<I: Scalar> fmt::Display for AbsValue<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsValue::Bot => f.write_str("bot"),
            AbsValue::Top => f.write_str("top"),
            AbsValue::Num(n) => write!(f, "{n}"),
            AbsValue::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}
