use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use qpi_core::{qpi_binomial, qpi_factorial, qpi_integer, RatFunc, Scalar};

fn laurent() -> impl Strategy<Value = RatFunc> {
    (-4i64..4, prop::collection::vec(-3i64..=3, 0..5)).prop_map(|(low, cs)| {
        let cs: Vec<BigRational> = cs.into_iter().map(|c| BigRational::from_integer(BigInt::from(c))).collect();
        RatFunc::from_laurent(low, &cs)
    })
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (laurent(), 0u32..3).prop_map(|(f, k)| {
        // divide by 1 - q^(2k) to leave the Laurent ring
        if k == 0 {
            f
        } else {
            let d = &RatFunc::one() - &RatFunc::q_pow(2 * k as i64);
            &f * &d.inv().unwrap()
        }
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (ratfunc(), ratfunc()).prop_map(|(a, b)| Scalar::from_even_odd(&a, &b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bar_is_an_involution(x in scalar()) {
        prop_assert_eq!(x.bar().bar(), x);
    }

    #[test]
    fn bar_is_a_ring_homomorphism(x in scalar(), y in scalar()) {
        prop_assert_eq!((&x + &y).bar(), &x.bar() + &y.bar());
        prop_assert_eq!((&x * &y).bar(), &x.bar() * &y.bar());
    }

    #[test]
    fn bar_sends_q_to_pi_over_q(k in -6i64..6) {
        prop_assert_eq!(Scalar::q_pow(k).bar(), Scalar::pi_q(k, -k));
        prop_assert_eq!(Scalar::pi().bar(), Scalar::pi());
    }

    #[test]
    fn text_round_trip(x in scalar()) {
        let s = x.to_string();
        let back: Scalar = s.parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn serde_round_trip(x in scalar()) {
        let s = serde_json::to_string(&x).unwrap();
        let back: Scalar = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn even_odd_round_trip(x in scalar()) {
        let (a, b) = x.even_odd();
        prop_assert_eq!(Scalar::from_even_odd(&a, &b), x);
    }

    #[test]
    fn specialization_is_multiplicative(x in scalar(), y in scalar()) {
        for s in [1i8, -1] {
            prop_assert_eq!((&x * &y).specialize(s).clone(), x.specialize(s) * y.specialize(s));
        }
    }

    #[test]
    fn integers_are_bar_invariant(n in -8i64..9, d in 1u32..4) {
        let odd = d % 2 == 1;
        let x = qpi_integer(n, d, odd);
        prop_assert_eq!(x.bar(), x);
    }

    #[test]
    fn pascal_rule(n in 0i64..9, a in 1u32..9, d in 1u32..3) {
        prop_assume!(a as i64 <= n + 1);
        let odd = d % 2 == 1;
        let p = if odd { 1 } else { 0 };
        let di = d as i64;
        let lhs = qpi_binomial(n + 1, a, d, odd);
        let rhs = &(&Scalar::pi_q(p * a as i64, di * a as i64) * &qpi_binomial(n, a, d, odd))
            + &(&Scalar::q_pow(-di * (n + 1 - a as i64)) * &qpi_binomial(n, a - 1, d, odd));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn binomial_from_factorials(n in 0u32..8, a in 0u32..8) {
        prop_assume!(a <= n);
        let f = |k: u32| qpi_factorial(k, 1, true);
        let want = f(n).checked_div(&(&f(a) * &f(n - a))).unwrap();
        prop_assert_eq!(qpi_binomial(n as i64, a, 1, true), want);
    }
}

/// `[n] = ((pi q)^n - q^-n) / (pi q - q^-1)` evaluated through the two specializations.
#[test]
fn integer_closed_form() {
    for n in -5i64..=7 {
        let num = &Scalar::pi_q(n, n) - &Scalar::q_pow(-n);
        let den = &Scalar::pi_q(1, 1) - &Scalar::q_pow(-1);
        assert_eq!(qpi_integer(n, 1, true), num.checked_div(&den).unwrap(), "n = {n}");
    }
    // [2] = pi q + q^-1, [3] = q^2 + pi + q^-2
    assert_eq!(qpi_integer(2, 1, true).to_string(), "q^(-1) + q*pi");
    assert_eq!(qpi_integer(3, 1, true), &(&Scalar::q_pow(2) + &Scalar::pi()) + &Scalar::q_pow(-2));
}

#[test]
fn pi_squares_to_one() {
    assert!((&Scalar::pi() * &Scalar::pi()).is_one());
    assert!((&Scalar::one() + &Scalar::pi()).is_zero_divisor());
    assert!((&Scalar::one() + &Scalar::pi()).inv().is_err());
}

#[test]
fn residues_at_zero() {
    let x = &Scalar::pi() + &Scalar::q_pow(3);
    assert!(x.is_regular_at_zero());
    assert_eq!(Scalar::from_pi_rational(&x.eval_at_q0().unwrap()), Scalar::pi());
    assert!(!Scalar::q_pow(-1).is_regular_at_zero());
}

#[test]
fn parse_rejects_garbage() {
    assert!("q^".parse::<Scalar>().is_err());
    assert!("1 + * pi".parse::<Scalar>().is_err());
}
