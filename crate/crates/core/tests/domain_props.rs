use proptest::prelude::*;
use retarget::domain::{parse_abs_value, AbsValue, Domain};
use retarget::scalar::Scalar;
use retarget::src_lang::SrcValue;
use retarget::BigInt;

fn domain() -> impl Strategy<Value = Domain> {
    prop::sample::select(Domain::ALL.to_vec())
}

/// Join of the points, or top.
fn around<I: Scalar>(d: Domain, points: &[I], top: bool) -> AbsValue<I> {
    if top {
        return AbsValue::Num(d.top());
    }
    points
        .iter()
        .map(|n| AbsValue::eta(&SrcValue::Int(n.clone()), d))
        .reduce(|a, b| a.join(&b))
        .unwrap_or(AbsValue::Bot)
}

fn int<I>(n: I) -> SrcValue<I> {
    SrcValue::Int(n)
}

fn operator_soundness<I: Scalar>(d: Domain, xs: &[I], ys: &[I], top: (bool, bool)) -> Result<(), TestCaseError> {
    let (a, b) = (around(d, xs, top.0), around(d, ys, top.1));
    let (n, m) = (&xs[0], &ys[0]);
    prop_assert!(AbsValue::abs_add(&a, &b, d).contains(&int(n.lang_add(m))));
    prop_assert!(AbsValue::abs_mul(&a, &b, d).contains(&int(n.lang_mul(m))));
    let bit = if n == m { I::one_value() } else { I::zero_value() };
    prop_assert!(AbsValue::abs_eq(&a, &b, d).contains(&int(bit)));
    if n.is_zero() {
        prop_assert!(AbsValue::filter_zero(&a, &b).contains(&int(m.clone())));
    } else {
        prop_assert!(AbsValue::filter_nonzero(&a, &b).contains(&int(m.clone())));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn eta_contains(d in domain(), n in any::<i64>(), small in -3i8..3) {
        prop_assert!(AbsValue::eta(&int(n), d).contains(&int(n)));
        prop_assert!(AbsValue::eta(&int(BigInt::from(n) * 1000), d).contains(&int(BigInt::from(n) * 1000)));
        let v = SrcValue::pair(int(small), SrcValue::pair(int(-small), int(small)));
        prop_assert!(AbsValue::eta(&v, d).contains(&v));
    }

    #[test]
    fn join_is_upper_bound(d in domain(), xs in prop::collection::vec(-100i64..100, 1..4),
                           ys in prop::collection::vec(any::<i64>(), 1..4), t in any::<(bool, bool)>()) {
        let (a, b) = (around(d, &xs, t.0), around(d, &ys, t.1));
        let j = a.join(&b);
        prop_assert!(a.leq(&j) && b.leq(&j));
        prop_assert!(a.leq(&a));
        prop_assert_eq!(a.join(&a), a.clone());
    }

    #[test]
    fn membership_is_monotone(d in domain(), xs in prop::collection::vec(-100i64..100, 1..4),
                              ys in prop::collection::vec(-100i64..100, 1..4)) {
        let a = around(d, &xs, false);
        let b = a.join(&around(d, &ys, false));
        prop_assert!(a.leq(&b));
        for x in &xs {
            prop_assert!(b.contains(&int(*x)));
        }
    }

    #[test]
    fn operators_sound_exact(d in domain(), xs in prop::collection::vec(-1000i64..1000, 1..4),
                             ys in prop::collection::vec(-1000i64..1000, 1..4), t in any::<(bool, bool)>()) {
        let xs: Vec<BigInt> = xs.into_iter().map(BigInt::from).collect();
        let ys: Vec<BigInt> = ys.into_iter().map(BigInt::from).collect();
        operator_soundness(d, &xs, &ys, t)?;
    }

    #[test]
    fn operators_sound_wrapping(d in domain(), xs in prop::collection::vec(any::<i8>(), 1..4),
                                ys in prop::collection::vec(any::<i8>(), 1..4), t in any::<(bool, bool)>(),
                                ws in prop::collection::vec(any::<i64>(), 1..3)) {
        operator_soundness(d, &xs, &ys, t)?;
        operator_soundness(d, &ws, &ws, t)?;
    }

    #[test]
    fn filters_shrink(d in domain(), xs in prop::collection::vec(-10i64..10, 1..4),
                      ys in prop::collection::vec(-10i64..10, 1..4)) {
        let (p, v) = (around(d, &xs, false), around(d, &ys, false));
        prop_assert!(AbsValue::filter_zero(&p, &v).leq(&v));
        prop_assert!(AbsValue::filter_nonzero(&p, &v).leq(&v));
    }

    #[test]
    fn text_round_trip(d in domain(), xs in prop::collection::vec(-100i64..100, 1..4)) {
        let a = around(d, &xs, false);
        prop_assert_eq!(parse_abs_value::<i64>(&a.to_string()).unwrap(), a);
    }
}
