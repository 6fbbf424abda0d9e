//! Integer scalars shared by every language level.
//!
//! All three languages (MET, SRC, TGT) compute over the same integer type so
//! that encodings are exact. The type is a parameter: [`num_bigint::BigInt`]
//! gives mathematical integers, while the fixed-width primitives wrap on
//! overflow (two's complement). Abstract domains consult [`Scalar::bounds`] to
//! stay sound under wraparound.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, Signed};

pub trait Scalar:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + FromStr
    + Signed
    + CheckedAdd
    + CheckedMul
    + Send
    + Sync
    + 'static
{
    /// `(MIN, MAX)` for fixed-width types, `None` when unbounded.
    fn bounds() -> Option<(Self, Self)>;

    /// Addition as performed by the languages (wraps for fixed widths).
    fn lang_add(&self, other: &Self) -> Self;

    /// Multiplication as performed by the languages (wraps for fixed widths).
    fn lang_mul(&self, other: &Self) -> Self;

    /// Converts, truncating to the type's width.
    fn from_i64_wrapping(v: i64) -> Self;

    fn is_bounded() -> bool {
        Self::bounds().is_some()
    }

    fn zero_value() -> Self {
        Self::zero()
    }

    fn one_value() -> Self {
        Self::one()
    }
}

macro_rules! impl_fixed_width {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn bounds() -> Option<(Self, Self)> {
                Some((<$t>::MIN, <$t>::MAX))
            }

            fn lang_add(&self, other: &Self) -> Self {
                self.wrapping_add(*other)
            }

            fn lang_mul(&self, other: &Self) -> Self {
                self.wrapping_mul(*other)
            }

            fn from_i64_wrapping(v: i64) -> Self {
                v as $t
            }
        }
    )*};
}

impl_fixed_width!(i8, i16, i32, i64, i128);

impl Scalar for BigInt {
    fn bounds() -> Option<(Self, Self)> {
        None
    }

    fn lang_add(&self, other: &Self) -> Self {
        self + other
    }

    fn lang_mul(&self, other: &Self) -> Self {
        self * other
    }

    fn from_i64_wrapping(v: i64) -> Self {
        BigInt::from(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_wraps() {
        assert_eq!(i8::MAX.lang_add(&1), i8::MIN);
        assert_eq!(64i8.lang_mul(&4), 0);
        assert_eq!(i8::from_i64_wrapping(300), 44);
    }

    #[test]
    fn bigint_is_exact() {
        let max = BigInt::from(i64::MAX);
        assert_eq!(max.lang_add(&BigInt::from(1)), BigInt::from(i64::MAX as i128 + 1));
        assert!(BigInt::bounds().is_none());
        assert!(i32::is_bounded());
    }
}
