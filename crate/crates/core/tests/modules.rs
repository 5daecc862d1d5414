use std::sync::Arc;

use qpi_core::checks::{boson_projector, divided_power_identity, odd_binomial_identity};
use qpi_core::crystal::Crystal;
use qpi_core::graded::{Graded, Kashiwara};
use qpi_core::half::HalfAlgebra;
use qpi_core::module::HighestWeightModule;
use qpi_core::projection::Projection;
use qpi_core::relations::check_relations;
use qpi_core::tensor::*;
use qpi_core::{CartanDatum, QpiError, Scalar};

fn module(name: &str, l: &[i64]) -> Arc<HighestWeightModule> {
    Arc::new(HighestWeightModule::new(&CartanDatum::builtin(name).unwrap(), l).unwrap())
}

fn crystal(v: &Arc<HighestWeightModule>) -> Crystal<HighestWeightModule> {
    Crystal::build(Arc::new(Kashiwara::new(v.clone())), v.depth_height()).unwrap()
}

#[test]
fn defining_relations_on_modules() {
    for (name, l) in [("osp12", vec![3]), ("osp14", vec![1, 1]), ("rank2", vec![1, 0]), ("oddpair", vec![1, 1])] {
        let d = CartanDatum::builtin(name).unwrap();
        let v = HighestWeightModule::truncated(&d, &l, 5, 400).unwrap();
        let rep = check_relations(&v).unwrap();
        assert!(rep.ok(), "{name} {l:?}: {:?}", rep.failures);
        assert!(rep.checked > 0);
    }
}

#[test]
fn budget_and_dominance_are_enforced() {
    let d = CartanDatum::builtin("osp14").unwrap();
    assert!(matches!(
        HighestWeightModule::with_budget(&d, &[4, 4], 50),
        Err(QpiError::DimensionBudgetExceeded(50))
    ));
    assert!(matches!(HighestWeightModule::new(&d, &[-1, 0]), Err(QpiError::NonDominantWeight(_))));
}

#[test]
fn projection_form_matches_the_recursion() {
    for (name, l) in [("osp12", vec![4]), ("osp14", vec![1, 1]), ("rank2", vec![1, 1])] {
        let d = CartanDatum::builtin(name).unwrap();
        let v = Arc::new(HighestWeightModule::truncated(&d, &l, 4, 400).unwrap());
        let u = Arc::new(HalfAlgebra::new(d.clone(), 4));
        let p = Projection::new(u.clone(), v.clone());
        for n in u.depths() {
            assert_eq!(*p.form_by_recursion(&n).unwrap(), p.pulled_back_form(&n).unwrap(), "{name} {n:?}");
            for i in 0..d.rank() {
                assert!(p.check_e_action(&n, i).unwrap(), "{name} {n:?} E_{}", i + 1);
            }
        }
    }
}

#[test]
fn tensor_rule_rank_one() {
    for n in 1..=3 {
        for m in 1..=3 {
            let (a, b) = (module("osp12", &[n]), module("osp12", &[m]));
            let (ca, cb) = (crystal(&a), crystal(&b));
            let t = Arc::new(TensorModule::new(a, b, Coproduct::Delta).unwrap());
            let kash = Kashiwara::new(t.clone());
            let rep = check_tensor_rule(&TensorLattice::new(&t, &ca, &cb), &kash).unwrap();
            assert!(rep.ok(), "V({n}) (x) V({m}): {:?}", rep.mismatches);
            assert_eq!(rep.checked, 2 * ((n + 1) * (m + 1)) as usize);
        }
    }
}

#[test]
fn tensor_rule_osp14_fundamentals() {
    let (a, b) = (module("osp14", &[1, 0]), module("osp14", &[0, 1]));
    let (ca, cb) = (crystal(&a), crystal(&b));
    let t = Arc::new(TensorModule::new(a, b, Coproduct::Delta).unwrap());
    let kash = Kashiwara::new(t.clone());
    let rep = check_tensor_rule(&TensorLattice::new(&t, &ca, &cb), &kash).unwrap();
    assert!(rep.ok(), "{:?}", rep.mismatches);
}

#[test]
fn phi_and_psi() {
    let d = CartanDatum::builtin("osp14").unwrap();
    let (a, b) = (module("osp14", &[1, 0]), module("osp14", &[1, 0]));
    let sum = HighestWeightModule::new(&d, &[2, 0]).unwrap();
    let t = TensorModule::new(a, b, Coproduct::Delta).unwrap();
    let maps = TensorMaps::new(&t, &sum).unwrap();
    assert!(maps.psi_phi_identity());
    assert!(intertwines(&t, &sum, &[0, 0], &maps.phi).unwrap());
}

#[test]
fn j_polarization() {
    for (name, l, m) in [("osp12", vec![2], vec![1]), ("osp14", vec![1, 0], vec![0, 1])] {
        let (a, b) = (module(name, &l), module(name, &m));
        let rep = j_polarization_check(&a, &b, Coproduct::DeltaPrime).unwrap();
        assert!(rep.ok(), "{name}: {:?}", rep.failures);
        assert!(rep.checked > 0);
    }
}

#[test]
fn tensor_product_is_a_module() {
    let (a, b) = (module("osp14", &[1, 0]), module("osp14", &[0, 1]));
    for flag in [Coproduct::Delta, Coproduct::DeltaPrime] {
        let t = TensorModule::new(a.clone(), b.clone(), flag).unwrap();
        let rep = check_relations(&t).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
    }
}

#[test]
fn odd_binomial_identity_small_range() {
    for r in 0..8 {
        for n in 1..8 {
            assert!(odd_binomial_identity(r, n), "r = {r}, n = {n}");
        }
    }
}

#[test]
fn divided_power_decomposition() {
    for name in ["osp14", "rank2"] {
        let d = CartanDatum::builtin(name).unwrap();
        for l in [d.fundamental(0), d.fundamental(1), vec![1, 1]] {
            let v = Arc::new(HighestWeightModule::truncated(&d, &l, 5, 400).unwrap());
            let kash = Kashiwara::new(v.clone());
            let rep = divided_power_identity(&v, &kash).unwrap();
            assert!(rep.ok(), "{name} {l:?}: {:?}", rep.failures);
        }
    }
}

#[test]
fn boson_projector_series() {
    for name in ["osp14", "rank2"] {
        let u = Arc::new(HalfAlgebra::new(CartanDatum::builtin(name).unwrap(), 4));
        let kash = Kashiwara::new(u.clone());
        let rep = boson_projector(&u, &kash, 4).unwrap();
        assert!(rep.ok(), "{name}: {:?}", rep.failures);
    }
}

/// `F^(k) v+` spans `V(n)` and the string ends at `k = n`.
#[test]
fn rank_one_strings() {
    for n in 0..=6i64 {
        let v = module("osp12", &[n]);
        let kash = Kashiwara::new(v.clone());
        for k in 0..=n as u32 + 1 {
            let x = kash.divided_power(0, &[0], k).unwrap().mul_vec(&[Scalar::one()]);
            assert_eq!(x.iter().all(|s| s.is_zero()), k as i64 > n, "n = {n}, k = {k}");
        }
    }
}
