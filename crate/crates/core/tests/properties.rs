use proptest::prelude::*;
use toric_core::groupring::{self, Laurent};
use toric_core::scalar::{Field, Novikov, NovikovField, Rat, Scalar, ScalarField};

fn finite_fields() -> Vec<ScalarField> {
    let mut out: Vec<ScalarField> = [2, 3, 5, 7].iter().map(|&p| ScalarField::prime(p).unwrap()).collect();
    out.extend([2, 3].iter().map(|&p| ScalarField::finite(p, 2).unwrap()));
    out
}

fn element(f: &ScalarField, code: i64) -> Scalar {
    match f.order() {
        Some(q) => f.from_encoded(code.rem_euclid(q as i64)),
        None => f.decode(&format!("{}/{}", code % 97, 1 + code.rem_euclid(13))).unwrap(),
    }
}

fn check_axioms(f: &ScalarField, a: &Scalar, b: &Scalar, c: &Scalar) {
    assert!(f.equal(&f.add(a, b), &f.add(b, a)));
    assert!(f.equal(&f.mul(a, b), &f.mul(b, a)));
    assert!(f.equal(&f.add(&f.add(a, b), c), &f.add(a, &f.add(b, c))));
    assert!(f.equal(&f.mul(&f.mul(a, b), c), &f.mul(a, &f.mul(b, c))));
    assert!(f.equal(&f.mul(a, &f.add(b, c)), &f.add(&f.mul(a, b), &f.mul(a, c))));
    assert!(f.is_zero(&f.add(a, &f.neg(a))));
    assert!(f.equal(&f.mul(a, &f.one()), a));
    match f.inv(a) {
        Some(ai) => assert!(f.is_one(&f.mul(a, &ai))),
        None => assert!(f.is_zero(a)),
    }
}

proptest! {
    #[test]
    fn finite_field_axioms(which in 0usize..6, a in 0i64..64, b in 0i64..64, c in 0i64..64) {
        let f = &finite_fields()[which];
        let (a, b, c) = (element(f, a), element(f, b), element(f, c));
        check_axioms(f, &a, &b, &c);
        // Frobenius is additive.
        let p = f.characteristic() as i64;
        prop_assert!(f.equal(&f.pow(&f.add(&a, &b), p).unwrap(), &f.add(&f.pow(&a, p).unwrap(), &f.pow(&b, p).unwrap())));
    }

    #[test]
    fn rational_axioms(a in -500i64..500, b in -500i64..500, c in -500i64..500) {
        let f = ScalarField::Rational;
        check_axioms(&f, &element(&f, a), &element(&f, b), &element(&f, c));
    }

    #[test]
    fn encoding_round_trips(which in 0usize..6, a in 0i64..64) {
        let f = &finite_fields()[which];
        let x = element(f, a);
        prop_assert_eq!(f.decode(&f.encode(&x)), Some(x));
    }
}

fn series(base: &ScalarField, terms: &[(i64, i64)]) -> Novikov {
    Novikov::from_terms(base, terms.iter().map(|&(e, c)| (Rat::new(e, 2), base.from_int(c))).collect(), None)
}

fn terms() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..6, -4i64..5), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn valuation_is_additive_and_ultrametric(a in terms(), b in terms()) {
        let base = ScalarField::Rational;
        let f = NovikovField::new(base.clone(), Rat::from_integer(10));
        let (x, y) = (series(&base, &a), series(&base, &b));
        prop_assume!(!f.is_zero(&x) && !f.is_zero(&y));
        let (vx, vy) = (f.valuation(&x).unwrap(), f.valuation(&y).unwrap());
        prop_assert_eq!(f.valuation(&f.mul(&x, &y)), Some(vx + vy));
        let sum = f.add(&x, &y);
        match f.valuation(&sum) {
            Some(v) => {
                prop_assert!(v >= vx.min(vy));
                if vx != vy {
                    prop_assert_eq!(v, vx.min(vy));
                }
            }
            None => prop_assert_eq!(vx, vy),
        }
    }

    #[test]
    fn inversion_to_precision(a in terms()) {
        let base = ScalarField::Rational;
        let f = NovikovField::new(base.clone(), Rat::from_integer(6));
        let x = series(&base, &a);
        prop_assume!(!f.is_zero(&x));
        let xi = f.inv(&x).unwrap();
        prop_assert!(f.is_one(&f.mul(&x, &xi)));
    }
}

fn laurent(f: &ScalarField, terms: &[(i64, i64, i64)]) -> Laurent<Scalar> {
    terms.iter().fold(Laurent::zero(2), |acc, &(a, b, c)| {
        groupring::add(f, &acc, &groupring::monomial(f, f.from_int(c), vec![a, b])).unwrap()
    })
}

fn laurent_terms() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    prop::collection::vec((-3i64..4, -3i64..4, -5i64..6), 0..5)
}

proptest! {
    #[test]
    fn group_ring_is_a_commutative_ring(a in laurent_terms(), b in laurent_terms(), c in laurent_terms()) {
        let f = ScalarField::prime(7).unwrap();
        let (a, b, c) = (laurent(&f, &a), laurent(&f, &b), laurent(&f, &c));
        let m = |x: &Laurent<Scalar>, y: &Laurent<Scalar>| groupring::mul(&f, x, y).unwrap();
        let s = |x: &Laurent<Scalar>, y: &Laurent<Scalar>| groupring::add(&f, x, y).unwrap();
        prop_assert_eq!(m(&a, &b), m(&b, &a));
        prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        prop_assert_eq!(m(&a, &s(&b, &c)), s(&m(&a, &b), &m(&a, &c)));
    }

    #[test]
    fn characters_are_ring_maps(a in laurent_terms(), b in laurent_terms(), x in 1i64..7, y in 1i64..7) {
        let f = ScalarField::prime(7).unwrap();
        let (a, b) = (laurent(&f, &a), laurent(&f, &b));
        let values = [f.from_int(x), f.from_int(y)];
        let ev = |p: &Laurent<Scalar>| groupring::hat_evaluate_scalar(&f, p, groupring::character(&f, &values)).unwrap();
        let prod = groupring::mul(&f, &a, &b).unwrap();
        prop_assert!(f.equal(&ev(&prod), &f.mul(&ev(&a), &ev(&b))));
    }

    #[test]
    fn log_derivative_is_a_derivation(a in laurent_terms(), b in laurent_terms(), axis in 0usize..2) {
        let f = ScalarField::Rational;
        let (a, b) = (laurent(&f, &a), laurent(&f, &b));
        let d = |p: &Laurent<Scalar>| groupring::log_derivative(&f, p, axis).unwrap();
        let lhs = d(&groupring::mul(&f, &a, &b).unwrap());
        let rhs = groupring::add(&f, &groupring::mul(&f, &d(&a), &b).unwrap(), &groupring::mul(&f, &a, &d(&b)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
