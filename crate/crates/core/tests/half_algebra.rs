use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use qpi_core::half::{all_words, depths_of_height, polarization_words, HalfAlgebra, HalfElement};
use qpi_core::{CartanDatum, Scalar};

/// Positive roots of a finite-type datum, as simple-root coordinates, by reflection closure.
fn positive_roots(d: &CartanDatum) -> Vec<Vec<i64>> {
    let r = d.rank();
    let mut seen: BTreeSet<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| (i == j) as i64).collect())
        .collect();
    let mut todo: Vec<Vec<i64>> = seen.iter().cloned().collect();
    while let Some(b) = todo.pop() {
        for i in 0..r {
            let pair: i64 = (0..r).map(|j| d.a(i, j) * b[j]).sum();
            let mut s = b.clone();
            s[i] -= pair;
            if s.iter().all(|&x| x >= 0) && s.iter().any(|&x| x > 0) && seen.insert(s.clone()) {
                todo.push(s);
            }
        }
    }
    seen.into_iter().collect()
}

/// Number of ways to write `n` as a sum of positive roots.
fn kostant(roots: &[Vec<i64>], n: &[i64]) -> usize {
    fn go(roots: &[Vec<i64>], k: usize, n: &mut Vec<i64>) -> usize {
        if n.iter().all(|&x| x == 0) {
            return 1;
        }
        if k == roots.len() {
            return 0;
        }
        let mut total = go(roots, k + 1, n);
        let mut used = 0;
        loop {
            for (a, b) in n.iter_mut().zip(&roots[k]) {
                *a -= b;
            }
            used += 1;
            if n.iter().any(|&x| x < 0) {
                break;
            }
            total += go(roots, k + 1, n);
        }
        for (a, b) in n.iter_mut().zip(&roots[k]) {
            *a += b * used;
        }
        total
    }
    go(roots, 0, &mut n.to_vec())
}

#[test]
fn root_oracle_sanity() {
    let d = CartanDatum::builtin("osp14").unwrap();
    let roots = positive_roots(&d);
    assert_eq!(roots, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 1]]);
    assert_eq!(positive_roots(&CartanDatum::builtin("osp16").unwrap()).len(), 9);
}

#[test]
fn dimensions_match_the_partition_function() {
    for (name, h) in [("osp12", 8), ("osp14", 7), ("osp16", 5), ("oddpair", 6)] {
        let d = CartanDatum::builtin(name).unwrap();
        let roots = positive_roots(&d);
        let u = HalfAlgebra::new(d.clone(), h);
        u.prefetch(h).unwrap();
        for k in 0..=h {
            for n in depths_of_height(d.rank(), k) {
                let want = kostant(&roots, &n.iter().map(|&x| x as i64).collect::<Vec<_>>());
                assert_eq!(u.dim(&n).unwrap(), want, "{name} at depth {n:?}");
            }
        }
    }
}

#[test]
fn osp14_depth_41_has_dimension_three() {
    let u = HalfAlgebra::new(CartanDatum::builtin("osp14").unwrap(), 5);
    let s = u.space(&[4, 1]).unwrap();
    assert_eq!(s.dim(), 3);
    assert_eq!(s.chosen_words, vec![vec![0, 0, 0, 0, 1], vec![0, 0, 0, 1, 0], vec![0, 0, 1, 0, 0]]);
}

#[test]
fn serre_elements_vanish() {
    for name in ["osp14", "osp16", "rank2"] {
        let d = CartanDatum::builtin(name).unwrap();
        let u = HalfAlgebra::new(d.clone(), 5);
        for i in 0..d.rank() {
            for j in 0..d.rank() {
                if i == j || (1 - d.a(i, j)) as usize + 1 > 5 {
                    continue;
                }
                let s = u.serre_element(i, j);
                assert!(u.is_zero_in_quotient(&s).unwrap(), "{name}: Serre element ({i}, {j})");
                for w in all_words(&s.weight().depth().unwrap()) {
                    let p = polarization_words(&d, &s, &HalfElement::word(d.rank(), w.clone()));
                    assert!(p.is_zero(), "{name}: Serre element pairs with {w:?}");
                }
            }
        }
    }
}

#[test]
fn gram_agrees_with_the_free_word_recursion() {
    let d = CartanDatum::builtin("osp14").unwrap();
    let u = HalfAlgebra::new(d.clone(), 5);
    for n in [vec![2, 1], vec![3, 1], vec![2, 2], vec![4, 1]] {
        let s = u.space(&n).unwrap();
        for (a, wa) in s.chosen_words.iter().enumerate() {
            for (b, wb) in s.chosen_words.iter().enumerate() {
                let x = HalfElement::word(2, wa.clone());
                let y = HalfElement::word(2, wb.clone());
                assert_eq!(s.gram.get(a, b), &polarization_words(&d, &x, &y), "{n:?} ({a}, {b})");
            }
        }
    }
}

#[test]
fn gram_is_symmetric() {
    let d = CartanDatum::builtin("rank2").unwrap();
    let u = HalfAlgebra::new(d, 5);
    u.prefetch(5).unwrap();
    for n in depths_of_height(2, 5) {
        let g = u.space(&n).unwrap().gram.clone();
        assert_eq!(g, g.transpose(), "{n:?}");
    }
}

#[test]
fn half_element_json_round_trip() {
    let x = HalfElement::word(2, vec![0, 1, 0])
        .scale(&(&Scalar::pi() + &Scalar::q_pow(-2)))
        .add(&HalfElement::word(2, vec![1, 0, 0]).scale(&Scalar::from_int(3)));
    let v = x.to_json();
    let words: Vec<Vec<u64>> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["word"].as_array().unwrap().iter().map(|w| w.as_u64().unwrap()).collect())
        .collect();
    assert!(words.contains(&vec![1, 2, 1]));
    assert_eq!(HalfElement::from_json(2, &v).unwrap(), x);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = CartanDatum::builtin("osp14").unwrap();
    let u = HalfAlgebra::new(d.clone(), 4);
    u.prefetch(4).unwrap();
    u.save_cache(dir.path()).unwrap();
    let v = Arc::new(HalfAlgebra::new(d.clone(), 4));
    let loaded = v.load_cache(dir.path()).unwrap();
    assert_eq!(loaded, (0..=4).map(|h| depths_of_height(2, h).len()).sum::<usize>());
    for n in depths_of_height(2, 4) {
        assert_eq!(v.space(&n).unwrap().gram, u.space(&n).unwrap().gram);
    }
    // a different datum does not pick up the file
    let w = HalfAlgebra::new(CartanDatum::builtin("rank2").unwrap(), 4);
    assert_eq!(w.load_cache(dir.path()).unwrap(), 0);
}

fn word(rank: usize, len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..rank, 0..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `(F_i y, z) = (y, E_i' z)` on free words.
    #[test]
    fn e_prime_is_adjoint_to_f(y in word(2, 3), i in 0usize..2, extra in 0usize..2) {
        let d = CartanDatum::builtin("osp14").unwrap();
        let u = HalfAlgebra::new(d.clone(), 5);
        let mut fy = vec![i];
        fy.extend(y.iter().copied());
        // a word of the same weight as F_i y
        let mut z = fy.clone();
        let k = extra % z.len();
        z.rotate_left(k);
        let z = HalfElement::word(2, z);
        let lhs = polarization_words(&d, &HalfElement::word(2, fy), &z);
        let rhs = polarization_words(&d, &HalfElement::word(2, y.clone()), &u.e_prime(i, &z).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bar_and_rho_are_involutions(w in word(2, 5)) {
        let x = HalfElement::word(2, w).scale(&(&Scalar::q_pow(1) + &Scalar::pi()));
        prop_assert_eq!(x.bar().bar(), x.clone());
        prop_assert_eq!(x.rho().rho(), x);
    }
}
