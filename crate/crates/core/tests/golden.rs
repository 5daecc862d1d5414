use qpi_core::golden::*;
use qpi_core::Scalar;

const KNOWN_FAILURES: [&str; 4] = [
    "canonical element at f~1^3 f~2 f~1 1 is F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2",
    "F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2 is bar-invariant",
    "(F1^(4)F2, F1^(4)F2) = (pi q)^6 / [4]! with positive exponent",
    "(F1^(3)(F2F1 - q^2F1F2), same) = (pi q)^3 (1 - q^4) / [3]! with positive exponent",
];

fn all_pass(checks: &[Check]) {
    for c in checks {
        assert!(c.ok, "{}", c.label);
    }
}

#[test]
fn rank_one_strings_up_to_eight() {
    let c = rank_one_strings(8).unwrap();
    assert_eq!(c.len(), 27);
    all_pass(&c);
}

#[test]
fn odd_rank_one_tensor_squares() {
    for n in 1..=6 {
        all_pass(&odd_rank_one_tensor(n).unwrap());
    }
}

#[test]
fn orthogonal_odd_pair() {
    all_pass(&odd_orthogonal_pair().unwrap());
}

#[test]
fn depth_41_only_the_known_statements_fail() {
    let v = osp14_depth_41().unwrap();
    let failing: Vec<&str> = v.checks.iter().filter(|c| !c.ok).map(|c| c.label.as_str()).collect();
    assert_eq!(failing, KNOWN_FAILURES);
    assert!(v.checks.len() > KNOWN_FAILURES.len());
}

#[test]
fn depth_41_pairings_frozen() {
    let v = osp14_depth_41().unwrap();
    // (pi q)^-6 / [4]! and (pi q)^-3 (1 - q^4) / [3]!
    let d = qpi_core::CartanDatum::builtin("osp14").unwrap();
    let f4 = d.qfact(0, 4).inv().unwrap();
    let f3 = d.qfact(0, 3).inv().unwrap();
    assert_eq!(v.pairings[0], &Scalar::pi_q(-6, -6) * &f4);
    assert_eq!(v.pairings[1], &(&Scalar::pi_q(-3, -3) * &f3) * &(&Scalar::one() - &Scalar::q_pow(4)));
    assert!(v.pairings[2].is_zero());
    // the positive-exponent reading is off by (pi q)^12 and (pi q)^6
    assert_ne!(v.pairings[0], &Scalar::pi_q(6, 6) * &f4);
}
