//! Retargeting an abstract interpreter by partial evaluation.
//!
//! Everything is generic over the integer type through [`scalar::Scalar`].
//! The aliases below fix it to arbitrary precision; [`fixed`] offers the
//! same names over wrapping `i64`.

pub mod analyzer;
pub mod corpus;
pub mod domain;
pub mod met;
pub mod pe;
pub mod retarget;
pub mod scalar;
pub mod src_lang;
pub mod tgt;

pub use num_bigint::BigInt;

pub type Int = BigInt;
pub type MetExpr = met::Expr<Int>;
pub type MetValue = met::Value<Int>;
pub type AbsValue = domain::AbsValue<Int>;
pub type SrcExpr = src_lang::SrcExpr<Int>;
pub type SrcValue = src_lang::SrcValue<Int>;
pub type TgtProgram = tgt::TgtProgram<Int>;
pub type RetargetedAnalyzer = retarget::RetargetedAnalyzer<Int>;

/// The same vocabulary over wrapping 64-bit integers.
pub mod fixed {
    pub type Int = i64;
    pub type MetExpr = crate::met::Expr<Int>;
    pub type MetValue = crate::met::Value<Int>;
    pub type AbsValue = crate::domain::AbsValue<Int>;
    pub type SrcExpr = crate::src_lang::SrcExpr<Int>;
    pub type SrcValue = crate::src_lang::SrcValue<Int>;
    pub type TgtProgram = crate::tgt::TgtProgram<Int>;
    pub type RetargetedAnalyzer = crate::retarget::RetargetedAnalyzer<Int>;
}
