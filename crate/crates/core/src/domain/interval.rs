//! Integer intervals with infinite bounds.
//!
//! For fixed-width scalars the infinities are normalized to the type's
//! extreme values, so two intervals are equal exactly when their
//! concretizations are. Any endpoint computation that leaves the
//! representable range yields top, which keeps arithmetic sound under
//! wraparound.

use std::cmp::Ordering;
use std::fmt;
use std::marker::PhantomData;

use super::NumericDomain;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound<I> {
    NegInf,
    Fin(I),
    PosInf,
}

impl<I: Ord> Ord for Bound<I> {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl<I: Ord> PartialOrd for Bound<I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<I: Scalar> fmt::Display for Bound<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::PosInf => f.write_str("+inf"),
            Bound::Fin(n) => write!(f, "{n}"),
        }
    }
}

impl<I: Scalar> Bound<I> {
    fn normalize(self) -> Self {
        match (&self, I::bounds()) {
            (Bound::NegInf, Some((min, _))) => Bound::Fin(min),
            (Bound::PosInf, Some((_, max))) => Bound::Fin(max),
            _ => self,
        }
    }

    /// Finite stand-in for fixed widths, infinities kept otherwise.
    fn to_ext(&self) -> Ext<I> {
        match (self, I::bounds()) {
            (Bound::NegInf, Some((min, _))) => Ext::Fin(min),
            (Bound::PosInf, Some((_, max))) => Ext::Fin(max),
            (Bound::NegInf, None) => Ext::NegInf,
            (Bound::PosInf, None) => Ext::PosInf,
            (Bound::Fin(n), _) => Ext::Fin(n.clone()),
        }
    }
}

/// Extended integers for endpoint arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Ext<I> {
    NegInf,
    Fin(I),
    PosInf,
}

impl<I: Scalar> Ext<I> {
    fn sign(&self) -> i8 {
        match self {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Fin(n) if n.is_negative() => -1,
            Ext::Fin(n) if n.is_zero() => 0,
            Ext::Fin(_) => 1,
        }
    }

    fn inf_with_sign(s: i8) -> Self {
        if s < 0 {
            Ext::NegInf
        } else {
            Ext::PosInf
        }
    }

    /// `None` on overflow of a fixed-width scalar. Never called with
    /// opposite infinities: lower bounds are never `+inf` and vice versa.
    fn add(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.checked_add(b).map(Ext::Fin),
            (Ext::NegInf, _) | (_, Ext::NegInf) => Some(Ext::NegInf),
            _ => Some(Ext::PosInf),
        }
    }

    fn mul(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.checked_mul(b).map(Ext::Fin),
            _ => {
                let s = self.sign() * other.sign();
                if s == 0 {
                    Some(Ext::Fin(I::zero_value()))
                } else {
                    Some(Ext::inf_with_sign(s))
                }
            }
        }
    }

    fn into_bound(self) -> Bound<I> {
        match self {
            Ext::NegInf => Bound::NegInf,
            Ext::PosInf => Bound::PosInf,
            Ext::Fin(n) => Bound::Fin(n).normalize(),
        }
    }
}

/// A nonempty interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval<I> {
    lo: Bound<I>,
    hi: Bound<I>,
}

impl<I: Scalar> Interval<I> {
    /// `None` when empty or when a bound is an infinity on the wrong side.
    pub fn new(lo: Bound<I>, hi: Bound<I>) -> Option<Self> {
        if matches!(lo, Bound::PosInf) || matches!(hi, Bound::NegInf) {
            return None;
        }
        let (lo, hi) = (lo.normalize(), hi.normalize());
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn finite(lo: I, hi: I) -> Option<Self> {
        Self::new(Bound::Fin(lo), Bound::Fin(hi))
    }

    pub fn singleton(n: I) -> Self {
        Self::new(Bound::Fin(n.clone()), Bound::Fin(n)).expect("singleton is nonempty")
    }

    pub fn top() -> Self {
        Interval { lo: Bound::NegInf.normalize(), hi: Bound::PosInf.normalize() }
    }

    pub fn lo(&self) -> &Bound<I> {
        &self.lo
    }

    pub fn hi(&self) -> &Bound<I> {
        &self.hi
    }

    pub fn contains(&self, n: &I) -> bool {
        let b = Bound::Fin(n.clone());
        self.lo <= b && b <= self.hi
    }

    pub fn as_singleton(&self) -> Option<I> {
        match (&self.lo, &self.hi) {
            (Bound::Fin(a), Bound::Fin(b)) if a == b => Some(a.clone()),
            _ => None,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    fn from_ext(lo: Option<Ext<I>>, hi: Option<Ext<I>>) -> Self {
        match (lo, hi) {
            (Some(lo), Some(hi)) => Interval::new(lo.into_bound(), hi.into_bound())
                .expect("endpoint arithmetic preserves order"),
            _ => Interval::top(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo.to_ext().add(&other.lo.to_ext());
        let hi = self.hi.to_ext().add(&other.hi.to_ext());
        Self::from_ext(lo, hi)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.lo.to_ext(), self.hi.to_ext());
        let (c, d) = (other.lo.to_ext(), other.hi.to_ext());
        let corners = [a.mul(&c), a.mul(&d), b.mul(&c), b.mul(&d)];
        if corners.iter().any(Option::is_none) {
            return Interval::top();
        }
        let corners: Vec<Ext<I>> = corners.into_iter().flatten().collect();
        let lo = corners.iter().min().cloned();
        let hi = corners.iter().max().cloned();
        Self::from_ext(lo, hi)
    }
}

impl<I: Scalar> fmt::Display for Interval<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalDomain<I>(PhantomData<I>);

impl<I> IntervalDomain<I> {
    pub fn new() -> Self {
        IntervalDomain(PhantomData)
    }
}

impl<I: Scalar> NumericDomain<I> for IntervalDomain<I> {
    type Elem = Interval<I>;

    fn eta_int(&self, n: &I) -> Interval<I> {
        Interval::singleton(n.clone())
    }

    fn leq(&self, a: &Interval<I>, b: &Interval<I>) -> bool {
        a.is_subset(b)
    }

    fn join(&self, a: &Interval<I>, b: &Interval<I>) -> Interval<I> {
        a.hull(b)
    }

    fn contains(&self, a: &Interval<I>, n: &I) -> bool {
        a.contains(n)
    }

    fn add(&self, a: &Interval<I>, b: &Interval<I>) -> Interval<I> {
        a.add(b)
    }

    fn mul(&self, a: &Interval<I>, b: &Interval<I>) -> Interval<I> {
        a.mul(b)
    }

    fn eq(&self, a: &Interval<I>, b: &Interval<I>) -> Interval<I> {
        let (zero, one) = (I::zero_value(), I::one_value());
        match (a.as_singleton(), b.as_singleton()) {
            (Some(x), Some(y)) if x == y => Interval::singleton(one),
            _ if a.is_disjoint(b) => Interval::singleton(zero),
            _ => Interval::finite(zero, one).expect("0 <= 1"),
        }
    }

    fn may_be_nonzero(&self, a: &Interval<I>) -> bool {
        a.as_singleton().is_none_or(|n| !n.is_zero())
    }

    fn may_be_zero(&self, a: &Interval<I>) -> bool {
        a.contains(&I::zero_value())
    }

    fn top(&self) -> Interval<I> {
        Interval::top()
    }
}
