//! Fixed computations with known answers: rank-one strings, the odd rank-one tensor
//! square, and the weight `-(4 a1 + a2)` of osp(1|4).

use std::sync::Arc;

use serde::Serialize;

use crate::canonical::{canonical_slice, is_bar_invariant, negative_control, MonomialOrder};
use crate::cartan::CartanDatum;
use crate::crystal::{Crystal, Residue};
use crate::error::Result;
use crate::graded::{Graded, Kashiwara};
use crate::half::{HalfAlgebra, HalfElement};
use crate::linalg::{dot, scalar_inverse, Matrix};
use crate::module::HighestWeightModule;
use crate::relations::check_relations;
use crate::scalar::Scalar;
use crate::tensor::{highest_weight_map, intertwines, Coproduct, TensorLattice, TensorModule};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub ok: bool,
}

fn check(out: &mut Vec<Check>, label: impl Into<String>, ok: bool) {
    out.push(Check { label: label.into(), ok });
}

fn module(datum: &CartanDatum, lambda: &[i64]) -> Result<(Arc<HighestWeightModule>, Crystal<HighestWeightModule>)> {
    let v = Arc::new(HighestWeightModule::new(datum, lambda)?);
    let h = v.depth_height();
    let c = Crystal::build(Arc::new(Kashiwara::new(v.clone())), h)?;
    Ok((v, c))
}

/// `F^(k) v+` in a rank-one module, or in any module along index `i`.
fn divided<M: Graded>(kash: &Kashiwara<M>, i: usize, k: u32) -> Result<Vec<Scalar>> {
    let rank = kash.module().datum().rank();
    Ok(kash.divided_power(i, &vec![0; rank], k)?.mul_vec(&[Scalar::one()]))
}

/// osp(1|2), `V(n)` for `n <= max_n`: dimension, the `F^(k) v+` string and all relations.
pub fn rank_one_strings(max_n: i64) -> Result<Vec<Check>> {
    let datum = CartanDatum::builtin("osp12")?;
    let mut out = Vec::new();
    for n in 0..=max_n {
        let (v, c) = module(&datum, &[n])?;
        check(&mut out, format!("dim V({n}) = {}", n + 1), v.total_dim() as i64 == n + 1);
        let mut string = c.nodes.len() as i64 == n + 1;
        for k in 0..=n as u32 {
            let x = divided(c.kashiwara(), 0, k)?;
            string &= matches!(c.residue(&[k], &x), Residue::Node(_, 1));
        }
        check(&mut out, format!("B({n}) is the string F^(k) v+ for 0 <= k <= {n}"), string);
        let rel = check_relations(v.as_ref())?;
        check(&mut out, format!("defining relations hold on V({n})"), rel.ok());
    }
    Ok(out)
}

fn lattice_congruent(
    lat: &TensorLattice<HighestWeightModule, HighestWeightModule>,
    n: &[u32],
    x: &[Scalar],
    y: &[Scalar],
) -> Result<bool> {
    let d: Vec<Scalar> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    Ok(lat.coords(n, &d)?.iter().all(|c| c.valuation().0.map_or(true, |v| v >= 1)))
}

/// `V(n) (x) V(1)` over osp(1|2): the singular vectors `w`, `z`, their divided-power
/// strings exactly and mod `qL`, and the splitting into `V(n+1) + V(n-1)`.
pub fn odd_rank_one_tensor(n: i64) -> Result<Vec<Check>> {
    let datum = CartanDatum::builtin("osp12")?;
    let (vn, cn) = module(&datum, &[n])?;
    let (v1, c1) = module(&datum, &[1])?;
    let t = Arc::new(TensorModule::new(vn.clone(), v1.clone(), Coproduct::Delta)?);
    let kt = Kashiwara::new(t.clone());
    let lat = TensorLattice::new(&t, &cn, &c1);
    let mut out = Vec::new();

    let nu = n as u32;
    let one = vec![Scalar::one()];
    let f1 = divided(c1.kashiwara(), 0, 1)?;
    // F^(k) v+_n (x) F^(right) v+_1
    let pure = |k: i64, right: u32| -> Result<Vec<Scalar>> {
        if k < 0 {
            return Ok(vec![Scalar::zero(); t.dim(&[(k + right as i64).max(0) as u32])?]);
        }
        let x = divided(cn.kashiwara(), 0, k as u32)?;
        let y = if right == 0 { one.clone() } else { f1.clone() };
        Ok(t.pure(&[k as u32], &x, &[right], &y)?.1)
    };
    let qn_inv = datum.qint(0, n).inv()?;
    let pin = Scalar::pi_pow(n);

    let w = pure(0, 0)?;
    let z_coef = &(&pin * &Scalar::q()) * &qn_inv;
    let z: Vec<Scalar> = pure(0, 1)?.iter().zip(pure(1, 0)?).map(|(a, b)| a - &(&z_coef * &b)).collect();
    let e0 = t.raise(0, &[0])?;
    let e1 = t.raise(0, &[1])?;
    check(&mut out, format!("n = {n}: w is singular"), e0.mul_vec(&w).iter().all(|x| x.is_zero()));
    check(&mut out, format!("n = {n}: z is singular"), e1.mul_vec(&z).iter().all(|x| x.is_zero()));

    let mut fw_exact = true;
    let mut fw_cong = true;
    for k in 0..=nu + 1 {
        let fw = kt.divided_power(0, &[0], k)?.mul_vec(&w);
        let e = (n + 1) - k as i64;
        let c = &pin * &Scalar::pi_q(e, e);
        let expect: Vec<Scalar> = pure(k as i64, 0)?
            .iter()
            .zip(pure(k as i64 - 1, 1)?)
            .map(|(a, b)| a + &(&c * &b))
            .collect();
        fw_exact &= fw == expect;
        let residue = if k <= nu {
            pure(k as i64, 0)?
        } else {
            pure(n, 1)?.iter().map(|x| &pin * x).collect()
        };
        fw_cong &= lattice_congruent(&lat, &[k], &fw, &residue)?;
    }
    check(&mut out, format!("n = {n}: closed form of F^(k) w"), fw_exact);
    check(&mut out, format!("n = {n}: F^(k) w mod qL"), fw_cong);

    let mut fz_exact = true;
    let mut fz_cong = true;
    for k in 0..nu {
        let fz = kt.divided_power(0, &[1], k)?.mul_vec(&z);
        let ki = k as i64;
        let a = &Scalar::one() - &(&Scalar::pi_q(n - ki, n - ki) * &(&qn_inv * &datum.qint(0, ki)));
        let b = &z_coef * &datum.qint(0, ki + 1);
        let expect: Vec<Scalar> = pure(ki, 1)?
            .iter()
            .zip(pure(ki + 1, 0)?)
            .map(|(x, y)| &(&a * x) - &(&b * &y))
            .collect();
        fz_exact &= fz == expect;
        fz_cong &= lattice_congruent(&lat, &[k + 1], &fz, &pure(ki, 1)?)?;
    }
    check(&mut out, format!("n = {n}: closed form of F^(k) z"), fz_exact);
    check(&mut out, format!("n = {n}: F^(k) z mod qL"), fz_cong);

    let up = HighestWeightModule::new(&datum, &[n + 1])?;
    let down = HighestWeightModule::new(&datum, &[n - 1])?;
    let phi_w = highest_weight_map(t.as_ref(), &up, &[0], &w)?;
    let phi_z = highest_weight_map(t.as_ref(), &down, &[1], &z)?;
    let mut iso = intertwines(t.as_ref(), &up, &[0], &phi_w)? && intertwines(t.as_ref(), &down, &[1], &phi_z)?;
    for k in 0..=nu + 1 {
        let d = t.dim(&[k])?;
        let mut cols = Vec::new();
        if let Some(m) = phi_w.get(&vec![k]) {
            cols.extend((0..m.cols()).map(|j| m.col(j)));
        }
        if let Some(m) = (k >= 1).then(|| phi_z.get(&vec![k - 1])).flatten() {
            cols.extend((0..m.cols()).map(|j| m.col(j)));
        }
        iso &= cols.len() == d && scalar_inverse(&Matrix::from_cols(&cols, d)).is_some();
    }
    check(&mut out, format!("n = {n}: V(n) (x) V(1) = V(n+1) + V(n-1) by an explicit change of basis"), iso);
    Ok(out)
}

/// Exact values at depth `(4, 1)` of U^- for osp(1|4).
pub struct Osp14Values {
    pub checks: Vec<Check>,
    /// The two stated elements as U^- elements.
    pub elements: [HalfElement; 2],
    pub pairings: [Scalar; 3],
}

pub fn osp14_depth_41() -> Result<Osp14Values> {
    let datum = CartanDatum::builtin("osp14")?;
    let u = Arc::new(HalfAlgebra::new(datum.clone(), 5));
    let c = Crystal::build(Arc::new(Kashiwara::new(u.clone())), 5)?;
    let n = vec![4u32, 1];
    let mut out = Vec::new();
    let word = |w: Vec<usize>| HalfElement::word(2, w);

    let x1 = u.divided_power_monomial(&[(0, 4), (1, 1)]);
    let inner = word(vec![1, 0]).sub(&word(vec![0, 1]).scale(&Scalar::q_pow(2)));
    let y = u.divided_power(0, 3).mul(&inner);
    let x2 = y.add(&x1.scale(&Scalar::q_pow(2)));
    let (cx1, cy, cx2) = (u.coords(&x1)?, u.coords(&y)?, u.coords(&x2)?);

    check(&mut out, "dimension of U^- at depth (4,1) is 3", u.dim(&n)? == 3);
    let b1 = c.follow(&[0, 0, 0, 0, 1]);
    let b2 = c.follow(&[0, 0, 0, 1, 0]);
    let (Some((b1, s1)), Some((b2, s2))) = (b1, b2) else {
        check(&mut out, "f~1^4 f~2 1 and f~1^3 f~2 f~1 1 are nodes", false);
        return Ok(Osp14Values { checks: out, elements: [x1, x2], pairings: [Scalar::zero(), Scalar::zero(), Scalar::zero()] });
    };
    check(&mut out, "f~1^4 f~2 1 = F1^(4) F2", s1 == 1 && c.lift(b1) == cx1);
    check(&mut out, "f~1^3 f~2 f~1 1 = F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2", s2 == 1 && c.lift(b2) == cx2);

    let g = canonical_slice(&c, &n, MonomialOrder::ReverseLex)?;
    let gb = |b: usize| g.iter().find(|e| e.node == b).map(|e| e.coords.clone());
    check(&mut out, "canonical element at f~1^4 f~2 1 is F1^(4) F2", gb(b1).as_ref() == Some(&cx1));
    check(
        &mut out,
        "canonical element at f~1^3 f~2 f~1 1 is F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2",
        gb(b2).as_ref() == Some(&cx2),
    );
    check(&mut out, "F1^(3)(F2F1 - q^2 F1F2) + q^2 F1^(4) F2 is bar-invariant", is_bar_invariant(&cx2));

    let gram = u.space(&n)?.gram.clone();
    let p = |a: &[Scalar], b: &[Scalar]| dot(a, &gram.mul_vec(b));
    let f4 = datum.qfact(0, 4).inv()?;
    let f3 = datum.qfact(0, 3).inv()?;
    let one_minus_q4 = &Scalar::one() - &Scalar::q_pow(4);
    let p11 = p(&cx1, &cx1);
    let pyy = p(&cy, &cy);
    let py1 = p(&cy, &cx1);
    check(&mut out, "(F1^(4)F2, F1^(4)F2) = (pi q)^-6 / [4]!", p11 == &Scalar::pi_q(-6, -6) * &f4);
    check(&mut out, "(F1^(4)F2, F1^(4)F2) = (pi q)^6 / [4]! with positive exponent", p11 == &Scalar::pi_q(6, 6) * &f4);
    check(
        &mut out,
        "(F1^(3)(F2F1 - q^2F1F2), same) = (pi q)^-3 (1 - q^4) / [3]!",
        pyy == &(&Scalar::pi_q(-3, -3) * &f3) * &one_minus_q4,
    );
    check(
        &mut out,
        "(F1^(3)(F2F1 - q^2F1F2), same) = (pi q)^3 (1 - q^4) / [3]! with positive exponent",
        pyy == &(&Scalar::pi_q(3, 3) * &f3) * &one_minus_q4,
    );
    check(&mut out, "(F1^(3)(F2F1 - q^2F1F2), F1^(4)F2) = 0", py1.is_zero());

    let l1 = c.lift(b1);
    let l2 = c.lift(b2);
    let at0 = |x: &Scalar| x.eval_at_q0().ok().map(|v| Scalar::from_pi_rational(&v));
    let p22 = p(&l2, &l2);
    let p12 = p(&l1, &l2);
    check(&mut out, "residue pairing (b1, b1)_0 = (1, 1)", at0(&p(&l1, &l1)) == Some(Scalar::one()));
    check(&mut out, "residue pairing (b2, b2)_0 = (1, -1)", at0(&p22) == Some(Scalar::pi()));
    check(&mut out, "residue pairing (b1, b2)_0 = (0, 0)", at0(&p12) == Some(Scalar::zero()));
    let mod_q = |x: &Scalar, k: i64| x.valuation().0.map_or(true, |v| v >= k);
    check(&mut out, "(b1, b1) = 1 mod q^2", mod_q(&(&p(&l1, &l1) - &Scalar::one()), 2));
    check(&mut out, "(b2, b2) = pi mod q^2", mod_q(&(&p22 - &Scalar::pi()), 2));
    check(&mut out, "(b1, b2) = q^2 mod q^4", mod_q(&(&p12 - &Scalar::q_pow(2)), 4));

    let nc = negative_control(&c, &n, &[(b1, l1), (b2, l2)])?;
    check(
        &mut out,
        "q^-1 (1 - pi)(b1 + b2) has self-pairing in A but lies outside L(infinity)",
        nc.is_some_and(|x| x.pairing_in_a && !x.in_lattice),
    );
    Ok(Osp14Values { checks: out, elements: [x1, x2], pairings: [p11, pyy, py1] })
}

/// Two orthogonal odd generators: `F_1 F_2 = pi F_2 F_1`, and `B(lambda)` at `pi = -1`
/// meets `pi B(lambda)`.
pub fn odd_orthogonal_pair() -> Result<Vec<Check>> {
    let datum = CartanDatum::builtin("oddpair")?;
    let u = HalfAlgebra::new(datum.clone(), 2);
    let mut out = Vec::new();
    let a = HalfElement::word(2, vec![0, 1]);
    let b = HalfElement::word(2, vec![1, 0]).scale(&Scalar::pi());
    check(&mut out, "F1 F2 = pi F2 F1", u.is_zero_in_quotient(&a.sub(&b))?);
    let (_, c) = module(&datum, &[1, 1])?;
    let top = vec![Scalar::one()];
    let k = c.kashiwara();
    let (_, x) = k.apply_f_word(&[0, 1], &[0, 0], &top)?;
    let (_, y) = k.apply_f_word(&[1, 0], &[0, 0], &top)?;
    let r1 = c.residue(&[1, 1], &x);
    let r2 = c.residue(&[1, 1], &y);
    let ok = match (r1, r2) {
        (Residue::Node(p, s), Residue::Node(q, t)) => p == q && s == -t,
        _ => false,
    };
    check(&mut out, "f~1 f~2 v+ = pi f~2 f~1 v+ in B(w1 + w2)", ok);
    Ok(out)
}
