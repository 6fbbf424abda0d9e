//! Sign-set domain: nonempty subsets of `{-, 0, +}`.

use std::fmt;
use std::marker::PhantomData;

use super::NumericDomain;
use crate::scalar::Scalar;

/// A nonempty subset of `{Neg, Zero, Pos}`. The empty set is not
/// representable here; bottom lives at the structured level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSet(u8);

impl SignSet {
    pub const NEG: SignSet = SignSet(0b001);
    pub const ZERO: SignSet = SignSet(0b010);
    pub const POS: SignSet = SignSet(0b100);
    pub const TOP: SignSet = SignSet(0b111);

    /// `None` for the empty set.
    pub fn from_bits(bits: u8) -> Option<SignSet> {
        (bits != 0 && bits & !0b111 == 0).then_some(SignSet(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn union(self, other: SignSet) -> SignSet {
        SignSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: SignSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn has_neg(self) -> bool {
        self.0 & Self::NEG.0 != 0
    }

    pub fn has_zero(self) -> bool {
        self.0 & Self::ZERO.0 != 0
    }

    pub fn has_pos(self) -> bool {
        self.0 & Self::POS.0 != 0
    }

    pub fn of<I: Scalar>(n: &I) -> SignSet {
        if n.is_negative() {
            Self::NEG
        } else if n.is_zero() {
            Self::ZERO
        } else {
            Self::POS
        }
    }

    pub fn contains<I: Scalar>(self, n: &I) -> bool {
        Self::of(n).is_subset(self)
    }

    fn atoms(self) -> impl Iterator<Item = SignSet> {
        [Self::NEG, Self::ZERO, Self::POS]
            .into_iter()
            .filter(move |a| a.is_subset(self))
    }

    fn lift(
        a: SignSet,
        b: SignSet,
        op: impl Fn(SignSet, SignSet) -> SignSet,
    ) -> SignSet {
        a.atoms()
            .flat_map(|x| b.atoms().map(move |y| (x, y)))
            .map(|(x, y)| op(x, y))
            .reduce(SignSet::union)
            .expect("sign sets are nonempty")
    }
}

impl fmt::Display for SignSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = [(Self::NEG, "-"), (Self::ZERO, "0"), (Self::POS, "+")]
            .into_iter()
            .filter(|(s, _)| s.is_subset(*self))
            .map(|(_, t)| t)
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The sign domain over scalar `I`. With fixed-width scalars, sums and
/// products that may overflow lose their sign information.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignDomain<I>(PhantomData<I>);

impl<I> SignDomain<I> {
    pub fn new() -> Self {
        SignDomain(PhantomData)
    }
}

impl<I: Scalar> NumericDomain<I> for SignDomain<I> {
    type Elem = SignSet;

    fn eta_int(&self, n: &I) -> SignSet {
        SignSet::of(n)
    }

    fn leq(&self, a: &SignSet, b: &SignSet) -> bool {
        a.is_subset(*b)
    }

    fn join(&self, a: &SignSet, b: &SignSet) -> SignSet {
        a.union(*b)
    }

    fn contains(&self, a: &SignSet, n: &I) -> bool {
        a.contains(n)
    }

    fn add(&self, a: &SignSet, b: &SignSet) -> SignSet {
        let wraps = I::is_bounded();
        SignSet::lift(*a, *b, |x, y| {
            if x == SignSet::ZERO {
                y
            } else if y == SignSet::ZERO {
                x
            } else if x != y {
                SignSet::TOP
            } else if !wraps {
                x
            } else if x == SignSet::POS {
                // MAX + MAX wraps to -2; the sum never reaches 2^width.
                SignSet::POS.union(SignSet::NEG)
            } else {
                SignSet::TOP
            }
        })
    }

    fn mul(&self, a: &SignSet, b: &SignSet) -> SignSet {
        let wraps = I::is_bounded();
        SignSet::lift(*a, *b, |x, y| {
            if x == SignSet::ZERO || y == SignSet::ZERO {
                SignSet::ZERO
            } else if wraps {
                SignSet::TOP
            } else if x == y {
                SignSet::POS
            } else {
                SignSet::NEG
            }
        })
    }

    fn eq(&self, a: &SignSet, b: &SignSet) -> SignSet {
        // {0} is the only singleton concretization.
        if *a == SignSet::ZERO && *b == SignSet::ZERO {
            SignSet::POS
        } else if a.0 & b.0 == 0 {
            SignSet::ZERO
        } else {
            SignSet::ZERO.union(SignSet::POS)
        }
    }

    fn may_be_nonzero(&self, a: &SignSet) -> bool {
        a.has_neg() || a.has_pos()
    }

    fn may_be_zero(&self, a: &SignSet) -> bool {
        a.has_zero()
    }

    fn top(&self) -> SignSet {
        SignSet::TOP
    }
}
