use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use qpi_core::canonical::*;
use qpi_core::crystal::Crystal;
use qpi_core::export::{self, PiMode};
use qpi_core::graded::{Depth, Kashiwara};
use qpi_core::half::{HalfAlgebra, HalfElement};
use qpi_core::module::HighestWeightModule;
use qpi_core::projection::Projection;
use qpi_core::{CartanDatum, Scalar};

fn binf(name: &str, h: usize) -> (Arc<HalfAlgebra>, Crystal<HalfAlgebra>) {
    let u = Arc::new(HalfAlgebra::new(CartanDatum::builtin(name).unwrap(), h));
    let c = Crystal::build(Arc::new(Kashiwara::new(u.clone())), h).unwrap();
    (u, c)
}

fn multinomial(n: &[u32]) -> usize {
    let f = |k: u32| (1..=k as usize).product::<usize>();
    f(n.iter().sum()) / n.iter().map(|&k| f(k)).product::<usize>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Divided-power monomials are run-length encodings of words, so there are as many as words.
    #[test]
    fn monomial_count(n in prop::collection::vec(0u32..4, 1..=3)) {
        let lex = dp_monomials(&n, MonomialOrder::Lex);
        prop_assert_eq!(lex.len(), multinomial(&n));
        for m in &lex {
            prop_assert!(m.windows(2).all(|w| w[0].0 != w[1].0));
            prop_assert!(m.iter().all(|&(_, a)| a > 0));
            let mut content = vec![0u32; n.len()];
            for &(i, a) in m {
                content[i] += a;
            }
            prop_assert_eq!(&content, &n);
        }
        let mut rev = dp_monomials(&n, MonomialOrder::ReverseLex);
        rev.reverse();
        prop_assert_eq!(rev, lex);
    }
}

#[test]
fn rank_one_canonical_basis_is_the_divided_powers() {
    let (_, c) = binf("osp12", 7);
    let g = canonical_basis(&c, MonomialOrder::Lex).unwrap();
    for (n, elems) in &g {
        assert_eq!(elems.len(), 1);
        let want: Vec<(DpMonomial, Scalar)> = if n[0] == 0 {
            vec![(vec![], Scalar::one())]
        } else {
            vec![(vec![(0, n[0])], Scalar::one())]
        };
        assert_eq!(elems[0].expansion, want, "{n:?}");
    }
}

fn check_all<M: qpi_core::graded::Graded>(c: &Crystal<M>, g: &BTreeMap<Depth, Vec<CanonicalElement>>) {
    for elems in g.values() {
        let fails = check_slice(c, elems).unwrap();
        assert!(fails.is_empty(), "{fails:?}");
        for e in elems {
            assert!(is_bar_invariant(&e.coords));
            assert!(is_integral(e));
            // the expansion reproduces the coordinates
            let mut sum = vec![Scalar::zero(); e.coords.len()];
            for (m, s) in &e.expansion {
                let v = monomial_vector(c, m).unwrap();
                for (a, b) in sum.iter_mut().zip(&v) {
                    *a = &*a + &(s * b);
                }
            }
            assert_eq!(sum, e.coords);
        }
    }
}

#[test]
fn properties_on_infinity_crystals() {
    for (name, h) in [("osp14", 5), ("rank2", 4), ("oddpair", 4)] {
        let (_, c) = binf(name, h);
        let g = canonical_basis(&c, MonomialOrder::Lex).unwrap();
        check_all(&c, &g);
        let r = canonical_basis(&c, MonomialOrder::ReverseLex).unwrap();
        for (n, elems) in &g {
            assert!(same_elements(elems, &r[n]), "{name}: orders disagree at {n:?}");
        }
    }
}

#[test]
fn depth_41_of_osp14() {
    let (u, c) = binf("osp14", 5);
    let elems = canonical_slice(&c, &[4, 1], MonomialOrder::Lex).unwrap();
    assert_eq!(elems.len(), 3);
    let g = |path: &[usize]| {
        let (b, s) = c.follow(path).unwrap();
        assert_eq!(s, 1);
        elems.iter().find(|e| e.node == b).unwrap().coords.clone()
    };
    let f4f2 = u.divided_power_monomial(&[(0, 4), (1, 1)]);
    let f3f2f1 = u.divided_power_monomial(&[(0, 3), (1, 1), (0, 1)]);
    // f~1^4 f~2 1 and f~1^3 f~2 f~1 1; paths are applied right to left
    assert_eq!(g(&[0, 0, 0, 0, 1]), u.coords(&f4f2).unwrap());
    let coeff = -&(&Scalar::q_pow(-1) + &Scalar::pi_q(1, 1));
    let want: HalfElement = f3f2f1.add(&f4f2.scale(&coeff));
    assert_eq!(g(&[0, 0, 0, 1, 0]), u.coords(&want).unwrap());
    // the element built from the lift differs from it inside q L(infinity)
    let lift = c.lift(c.follow(&[0, 0, 0, 1, 0]).unwrap().0);
    let diff: Vec<Scalar> = lift.iter().zip(g(&[0, 0, 0, 1, 0])).map(|(a, b)| a - &b).collect();
    assert!(c.in_q_lattice(&[4, 1], &diff));
    assert!(!diff.iter().all(|x| x.is_zero()));
}

#[test]
fn module_compatibility() {
    let d = CartanDatum::builtin("osp14").unwrap();
    let (u, binf) = binf("osp14", 5);
    let gu = canonical_basis(&binf, MonomialOrder::Lex).unwrap();
    for l in [vec![1, 0], vec![0, 1], vec![1, 1]] {
        let v = Arc::new(HighestWeightModule::truncated(&d, &l, 5, 400).unwrap());
        let bla = Crystal::build(Arc::new(Kashiwara::new(v.clone())), 5).unwrap();
        let gv = canonical_basis(&bla, MonomialOrder::Lex).unwrap();
        check_all(&bla, &gv);
        let proj = Projection::new(u.clone(), v.clone());
        let fails = check_module_compatibility(&proj, &binf, &gu, &bla, &gv).unwrap();
        assert!(fails.is_empty(), "{l:?}: {fails:?}");
    }
}

#[test]
fn negative_control_leaves_the_lattice() {
    let (_, c) = binf("osp14", 5);
    let n = [4u32, 1];
    let cands: Vec<(usize, Vec<Scalar>)> = c.slice(&n).unwrap().nodes.iter().map(|&b| (b, c.lift(b))).collect();
    let nc = negative_control(&c, &n, &cands).unwrap().unwrap();
    assert!(nc.pairing_in_a);
    assert!(!nc.in_lattice);
}

#[test]
fn bar_defect_detects_non_invariance() {
    let x = vec![Scalar::q_pow(2), Scalar::one()];
    assert!(!is_bar_invariant(&x));
    assert!(is_bar_invariant(&[&Scalar::q_pow(1) + &Scalar::pi_q(1, -1)]));
    let d = bar_defect(&x).unwrap();
    assert!(!d[0].is_zero() && d[1].is_zero());
}

#[test]
fn renderings() {
    let (_, c) = binf("osp14", 5);
    let mut g = BTreeMap::new();
    g.insert(vec![4u32, 1], canonical_slice(&c, &[4, 1], MonomialOrder::Lex).unwrap());
    let tex = export::canonical_tex(&c, &g, PiMode::Formal, false);
    assert!(tex.contains("&= F_{1}^{(4)}F_{2}"), "{tex}");
    assert!(tex.contains("(-q^{-1} - q\\pi) F_{1}^{(4)}F_{2}"), "{tex}");
    let text = export::canonical_text(&c, &g, PiMode::Minus, false);
    assert!(text.contains("(q - q^(-1)) F1^(4) F2"), "{text}");
    let v = export::canonical_json(&c, &g, PiMode::Formal, true);
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[0]["terms"][0]["monomial"], serde_json::json!([[1, 4], [2, 1]]));
}

/// At depth (2,4) the monomials are dependent and the first rational solution is fractional.
#[test]
fn dependent_monomials_still_give_integral_expansions() {
    let (u, c) = binf("osp14", 6);
    let elems = canonical_slice(&c, &[2, 4], MonomialOrder::Lex).unwrap();
    assert!(check_slice(&c, &elems).unwrap().is_empty());
    let mut g = BTreeMap::new();
    g.insert(vec![2u32, 4], elems);
    check_all(&c, &g);
    let top = u.divided_power_monomial(&[(1, 4), (0, 2)]);
    assert!(g[&vec![2u32, 4]].iter().any(|e| e.coords == u.coords(&top).unwrap()));
}
