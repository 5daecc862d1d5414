//! Canonical bases: for each crystal node `b`, the unique bar-invariant element of the
//! integral form whose lattice coordinates are `e_b + q A`.
//!
//! Candidates are combinations `sum c_k D_k` of divided-power monomials `D_k` applied to
//! the top vector, with bar-invariant Laurent coefficients `c_k`. For each specialization
//! the residue conditions are linear over Q in the Laurent coefficients of the `c_k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::crystal::{Crystal, Residue};
use crate::error::{QpiError, Result};
use crate::graded::{Depth, Graded};
use crate::half::{height, HalfAlgebra};
use crate::linalg::{dot, rref, scalar_solve, split_vec, IntegerSolver, Matrix};
use crate::module::HighestWeightModule;
use crate::poly::Poly;
use crate::projection::Projection;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::IntPoly;

/// `F_{i1}^{(a1)} ... F_{ik}^{(ak)}`, consecutive indices distinct.
pub type DpMonomial = Vec<(usize, u32)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MonomialOrder {
    Lex,
    ReverseLex,
}

/// All divided-power monomials of depth `n`.
pub fn dp_monomials(n: &[u32], order: MonomialOrder) -> Vec<DpMonomial> {
    fn rec(rest: &mut Vec<u32>, prev: Option<usize>, cur: &mut DpMonomial, out: &mut Vec<DpMonomial>) {
        if rest.iter().all(|&x| x == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            if Some(i) == prev {
                continue;
            }
            for a in 1..=rest[i] {
                rest[i] -= a;
                cur.push((i, a));
                rec(rest, Some(i), cur, out);
                cur.pop();
                rest[i] += a;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut n.to_vec(), None, &mut Vec::new(), &mut out);
    out.sort();
    if order == MonomialOrder::ReverseLex {
        out.reverse();
    }
    out
}

/// Coordinates of a monomial applied to the top vector.
pub fn monomial_vector<M: Graded>(c: &Crystal<M>, mono: &[(usize, u32)]) -> Result<Vec<Scalar>> {
    let kash = c.kashiwara();
    let mut depth = vec![0u32; c.datum().rank()];
    let mut v = vec![Scalar::one()];
    for &(i, a) in mono.iter().rev() {
        v = kash.divided_power(i, &depth, a)?.mul_vec(&v);
        depth[i] += a;
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct CanonicalElement {
    pub node: usize,
    pub depth: Depth,
    /// Coordinates in the basis of the graded module.
    pub coords: Vec<Scalar>,
    /// One expression as a combination of divided-power monomials.
    pub expansion: Vec<(DpMonomial, Scalar)>,
}

/// Largest Laurent degree tried for the coefficients at depth `n`.
pub fn degree_bound(datum: &crate::CartanDatum, n: &[u32]) -> i64 {
    2 * (height(n) as i64 * datum.max_d() as i64) + 4
}

fn laurent_table(f: &RatFunc, upto: i64) -> (i64, Vec<BigRational>) {
    f.laurent(upto)
}

fn coeff_at(tab: &(i64, Vec<BigRational>), t: i64) -> BigRational {
    let (v, c) = tab;
    if t < *v {
        return BigRational::zero();
    }
    c.get((t - v) as usize).cloned().unwrap_or_else(BigRational::zero)
}

/// Bar-invariant coefficient `a_0 + sum_j a_j (q^j + eps^j q^-j)`.
fn symmetric_laurent(a: &[BigRational], eps: i64) -> RatFunc {
    let n = a.len() as i64 - 1;
    let mut c = vec![BigRational::zero(); (2 * n + 1) as usize];
    c[n as usize] = a[0].clone();
    for j in 1..=n {
        c[(n + j) as usize] += &a[j as usize];
        let s = if eps < 0 && j % 2 == 1 { -a[j as usize].clone() } else { a[j as usize].clone() };
        c[(n - j) as usize] += s;
    }
    RatFunc::from_laurent(-n, &c)
}

/// Rows `coefficient of q^t in lattice coordinate c`, `t <= 0`, in the unknowns `a_{k,j}`,
/// followed by one right-hand column per node.
fn component_system(r: &[Vec<RatFunc>], d: usize, eps: i64, deg: i64) -> Matrix<BigRational> {
    let mons = r.len();
    let vmin = r
        .iter()
        .flatten()
        .filter_map(|x| x.valuation())
        .min()
        .unwrap_or(0)
        .min(0);
    let tmin = vmin - deg;
    let tabs: Vec<Vec<(i64, Vec<BigRational>)>> =
        r.iter().map(|row| row.iter().map(|x| laurent_table(x, deg)).collect()).collect();
    let w = (deg + 1) as usize;
    let unknowns = mons * w;
    let nt = (-tmin + 1) as usize;
    let mut m: Matrix<BigRational> = Matrix::zeros(d * nt, unknowns + d);
    for c in 0..d {
        for (ti, t) in (tmin..=0).enumerate() {
            let row = c * nt + ti;
            for k in 0..mons {
                let tab = &tabs[k][c];
                for j in 0..=deg {
                    let mut v = coeff_at(tab, t - j);
                    if j > 0 {
                        let s = coeff_at(tab, t + j);
                        if eps < 0 && j % 2 == 1 {
                            v -= s;
                        } else {
                            v += s;
                        }
                    }
                    if !v.is_zero() {
                        m.set(row, k * w + j as usize, v);
                    }
                }
            }
            if t == 0 {
                m.set(row, unknowns + c, BigRational::one());
            }
        }
    }
    m
}

/// Coefficients `c_{m,b}` for one specialization, trying Laurent degree `deg`.
fn solve_component(r: &[Vec<RatFunc>], d: usize, eps: i64, deg: i64) -> Option<Vec<Vec<RatFunc>>> {
    let w = (deg + 1) as usize;
    let unknowns = r.len() * w;
    let (red, pivots) = rref(&component_system(r, d, eps, deg));
    if pivots.iter().any(|&p| p >= unknowns) {
        return None;
    }
    let mut sol = vec![vec![vec![BigRational::zero(); w]; r.len()]; d];
    for (row, &p) in pivots.iter().enumerate() {
        for (b, s) in sol.iter_mut().enumerate() {
            s[p / w][p % w] = red.get(row, unknowns + b).clone();
        }
    }
    Some(
        sol.into_iter()
            .map(|per_b| per_b.iter().map(|a| symmetric_laurent(a, eps)).collect())
            .collect(),
    )
}

/// Both specializations at once with `a_plus = x + y`, `a_minus = x - y` and `x, y`
/// integral, so that every coefficient lies in `Z[q, q^-1]^pi`. `None` if no such
/// solution exists at degree `deg`.
fn solve_integral(lat: &[[Vec<RatFunc>; 2]], d: usize, deg: i64) -> Option<[Vec<Vec<RatFunc>>; 2]> {
    let r: [Vec<Vec<RatFunc>>; 2] = [0, 1].map(|k| lat.iter().map(|x| x[k].clone()).collect());
    let w = (deg + 1) as usize;
    let unknowns = r[0].len() * w;
    let plus = component_system(&r[0], d, 1, deg);
    let minus = component_system(&r[1], d, -1, deg);
    let rows = plus.rows() + minus.rows();
    let joint = Matrix::from_fn(rows, 2 * unknowns + d, |i, j| {
        let (m, i, sign) = if i < plus.rows() { (&plus, i, 1) } else { (&minus, i - plus.rows(), -1) };
        if j < unknowns {
            m.get(i, j).clone()
        } else if j < 2 * unknowns {
            let v = m.get(i, j - unknowns).clone();
            if sign < 0 { -v } else { v }
        } else {
            m.get(i, j - unknowns).clone()
        }
    });
    let (red, pivots) = rref(&joint);
    if pivots.iter().any(|&p| p >= 2 * unknowns) {
        return None;
    }
    let int_rows: Vec<Vec<BigInt>> = (0..pivots.len())
        .map(|i| {
            let row: Vec<BigRational> = (0..joint.cols()).map(|j| red.get(i, j).clone()).collect();
            let l = row.iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let lhs: Vec<Vec<BigInt>> = int_rows.iter().map(|r| r[..2 * unknowns].to_vec()).collect();
    let solver = IntegerSolver::new(&lhs, 2 * unknowns);
    let mut out: [Vec<Vec<RatFunc>>; 2] = [Vec::new(), Vec::new()];
    for b in 0..d {
        let rhs: Vec<BigInt> = int_rows.iter().map(|r| r[2 * unknowns + b].clone()).collect();
        let z = solver.solve(&rhs)?;
        let (x, y) = z.split_at(unknowns);
        for (k, eps) in [(0usize, 1i64), (1, -1)] {
            let a: Vec<BigRational> = x
                .iter()
                .zip(y)
                .map(|(x, y)| BigRational::from_integer(if k == 0 { x + y } else { x - y }))
                .collect();
            out[k].push(a.chunks(w).map(|c| symmetric_laurent(c, eps)).collect());
        }
    }
    Some(out)
}

fn coefficient(coeffs: &[Vec<Vec<RatFunc>>; 2], b: usize, m: usize) -> Scalar {
    Scalar::new(coeffs[0][b][m].clone(), coeffs[1][b][m].clone())
}

/// Canonical elements for the nodes at depth `n`, in slice order.
pub fn canonical_slice<M: Graded>(c: &Crystal<M>, n: &[u32], order: MonomialOrder) -> Result<Vec<CanonicalElement>> {
    let Some(slice) = c.slice(n) else {
        return Ok(Vec::new());
    };
    let d = slice.nodes.len();
    let mut mons = Vec::new();
    let mut vecs = Vec::new();
    for mono in dp_monomials(n, order) {
        let v = monomial_vector(c, &mono)?;
        if v.iter().any(|x| !x.is_zero()) {
            mons.push(mono);
            vecs.push(v);
        }
    }
    let lat: Vec<[Vec<RatFunc>; 2]> = vecs.iter().map(|v| split_vec(&slice.lifts_inv.mul_vec(v))).collect();
    let bound = degree_bound(c.datum(), n);
    let mut coeffs: [Vec<Vec<RatFunc>>; 2] = [Vec::new(), Vec::new()];
    let mut top = 0;
    for (k, eps) in [(0usize, 1i64), (1, -1)] {
        let r: Vec<Vec<RatFunc>> = lat.iter().map(|x| x[k].clone()).collect();
        let mut deg = 0;
        loop {
            if let Some(s) = solve_component(&r, d, eps, deg) {
                coeffs[k] = s;
                break;
            }
            if deg >= bound {
                return Err(QpiError::NonTerminating(bound));
            }
            deg = (deg * 2).max(1).min(bound);
        }
        top = top.max(deg);
    }
    // monomials can be dependent, and then the first solution may have fractional coefficients
    let integral = (0..d).all(|b| (0..vecs.len()).all(|m| coefficient(&coeffs, b, m).is_integral_laurent()));
    if !integral {
        let mut deg = top;
        loop {
            if let Some(s) = solve_integral(&lat, d, deg) {
                coeffs = s;
                break;
            }
            if deg >= bound {
                break;
            }
            deg = (deg * 2).max(1).min(bound);
        }
    }
    let dim = vecs.first().map_or(0, |v| v.len());
    let mut out = Vec::with_capacity(d);
    for b in 0..d {
        let mut coords = vec![Scalar::zero(); dim];
        let mut expansion = Vec::new();
        for (m, v) in vecs.iter().enumerate() {
            let s = coefficient(&coeffs, b, m);
            if s.is_zero() {
                continue;
            }
            for (x, y) in coords.iter_mut().zip(v) {
                *x = &*x + &(&s * y);
            }
            expansion.push((mons[m].clone(), s));
        }
        out.push(CanonicalElement {
            node: slice.nodes[b],
            depth: n.to_vec(),
            coords,
            expansion,
        });
    }
    Ok(out)
}

/// Canonical elements at every depth of the crystal.
pub fn canonical_basis<M: Graded>(c: &Crystal<M>, order: MonomialOrder) -> Result<BTreeMap<Depth, Vec<CanonicalElement>>> {
    let mut out = BTreeMap::new();
    for n in c.slices.keys() {
        out.insert(n.clone(), canonical_slice(c, n, order)?);
    }
    Ok(out)
}

pub fn is_bar_invariant(coords: &[Scalar]) -> bool {
    coords.iter().all(|x| x.bar() == *x)
}

/// `(x - bar x) / (pi q - q^{-1})`, which vanishes on bar-invariant vectors.
pub fn bar_defect(coords: &[Scalar]) -> Result<Vec<Scalar>> {
    let den = (&Scalar::pi_q(1, 1) - &Scalar::q_pow(-1)).inv()?;
    Ok(coords.iter().map(|x| &(x - &x.bar()) * &den).collect())
}

/// Every factor of the denominator of `f` other than `q` divides some `1 - (eps q^2)^m`.
fn quantum_denominator(f: &RatFunc, eps: i64) -> bool {
    let mut den = f.denom().clone();
    if let Some(a) = den.low_degree() {
        den = den.shift_down(a);
    }
    let mut m = den.degree().unwrap_or(0) + 1;
    while m >= 1 && den.degree().unwrap_or(0) > 0 {
        let c = if eps < 0 && m % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        let mut coeffs = vec![BigInt::zero(); 2 * m + 1];
        coeffs[0] = BigInt::one();
        coeffs[2 * m] = -c;
        let p: IntPoly = Poly::new(coeffs);
        loop {
            let g = p.gcd(&den);
            if g.degree().unwrap_or(0) == 0 {
                break;
            }
            den = den.div_exact(&g);
        }
        m -= 1;
    }
    den.degree() == Some(0)
}

/// Coefficients of the expansion lie in `Z[q, q^-1]^pi`, and coordinates only have
/// quantum-factorial denominators.
pub fn is_integral(e: &CanonicalElement) -> bool {
    e.expansion.iter().all(|(_, s)| s.is_integral_laurent())
        && e
            .coords
            .iter()
            .all(|x| quantum_denominator(&x.plus, 1) && quantum_denominator(&x.minus, -1))
}

/// Whether `x` at depth `n` lies in `F_i^{t} M` for the given `t`.
pub fn in_divided_image<M: Graded>(c: &Crystal<M>, i: usize, t: u32, n: &[u32], x: &[Scalar]) -> Result<bool> {
    if t == 0 {
        return Ok(true);
    }
    if n[i] < t {
        return Ok(x.iter().all(|v| v.is_zero()));
    }
    let mut m = n.to_vec();
    m[i] -= t;
    let a = c.kashiwara().divided_power(i, &m, t)?;
    if a.cols() == 0 {
        return Ok(x.iter().all(|v| v.is_zero()));
    }
    Ok(scalar_solve(&a, x).is_some())
}

/// Failures of the defining properties of a computed canonical slice.
pub fn check_slice<M: Graded>(c: &Crystal<M>, elems: &[CanonicalElement]) -> Result<Vec<String>> {
    let mut fails = Vec::new();
    for (k, e) in elems.iter().enumerate() {
        let b = e.node;
        if !is_bar_invariant(&e.coords) || bar_defect(&e.coords)?.iter().any(|x| !x.is_zero()) {
            fails.push(format!("node {b}: not bar-invariant"));
        }
        let y = c.coords(&e.depth, &e.coords);
        for (j, v) in y.iter().enumerate() {
            let want = if j == k { Scalar::one() } else { Scalar::zero() };
            let diff = v - &want;
            if diff.valuation().0.is_some_and(|x| x < 1) {
                fails.push(format!("node {b}: lattice coordinate {j} is not {} mod q", if j == k { 1 } else { 0 }));
            }
        }
        if !is_integral(e) {
            fails.push(format!("node {b}: not in the integral form"));
        }
        for i in 0..c.datum().rank() {
            let t = c.nodes[b].eps[i];
            if !in_divided_image(c, i, t, &e.depth, &e.coords)? {
                fails.push(format!("node {b}: not in F_{}^{t} applied to the module", i + 1));
            }
        }
    }
    Ok(fails)
}

/// Whether two computations of the same slice agree.
pub fn same_elements(a: &[CanonicalElement], b: &[CanonicalElement]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.node == y.node && x.coords == y.coords)
}

/// `x = q^{-1} (1 - pi) (x1 + x2)` for vectors with residue self-pairings `1` and `pi`.
pub struct NegativeControl {
    pub nodes: (usize, usize),
    pub coords: Vec<Scalar>,
    pub pairing: Scalar,
    pub pairing_in_a: bool,
    pub in_lattice: bool,
}

/// Builds the control from the first suitable pair among `(node, coords)` at depth `n`.
pub fn negative_control<M: Graded>(
    c: &Crystal<M>,
    n: &[u32],
    cands: &[(usize, Vec<Scalar>)],
) -> Result<Option<NegativeControl>> {
    let g = c.module().gram(n)?;
    let pi = Scalar::pi();
    let at0 = |x: &Scalar| x.eval_at_q0().ok().map(|v| Scalar::from_pi_rational(&v));
    let mut even = None;
    let mut odd = None;
    for (b, x) in cands {
        match at0(&dot(x, &g.mul_vec(x))) {
            Some(v) if v.is_one() && even.is_none() => even = Some((*b, x)),
            Some(v) if v == pi && odd.is_none() => odd = Some((*b, x)),
            _ => {}
        }
    }
    let (Some((b1, x1)), Some((b2, x2))) = (even, odd) else {
        return Ok(None);
    };
    let s = &Scalar::q_pow(-1) * &(&Scalar::one() - &pi);
    let coords: Vec<Scalar> = x1.iter().zip(x2).map(|(a, b)| &s * &(a + b)).collect();
    let pairing = dot(&coords, &g.mul_vec(&coords));
    let y = c.coords(n, &coords);
    Ok(Some(NegativeControl {
        nodes: (b1, b2),
        pairing_in_a: pairing.is_regular_at_zero(),
        in_lattice: y.iter().all(|v| v.is_regular_at_zero()),
        coords,
        pairing,
    }))
}

/// `G(b) v+ = G_lambda(b')` when the image of `b` is `b'` up to sign, and `0` when it is zero.
pub fn check_module_compatibility(
    proj: &Projection,
    binf: &Crystal<HalfAlgebra>,
    gu: &BTreeMap<Depth, Vec<CanonicalElement>>,
    bla: &Crystal<HighestWeightModule>,
    gv: &BTreeMap<Depth, Vec<CanonicalElement>>,
) -> Result<Vec<String>> {
    let mut fails = Vec::new();
    for (n, elems) in gu {
        if height(n) > bla.height {
            continue;
        }
        for e in elems {
            let x = proj.apply(n, &e.coords)?;
            let want = match proj.project_node(binf, bla, e.node)? {
                Residue::Zero => vec![Scalar::zero(); x.len()],
                Residue::Node(b, s) => {
                    let Some(g) = gv.get(n).and_then(|v| v.iter().find(|g| g.node == b)) else {
                        fails.push(format!("node {}: no canonical element for image {b}", e.node));
                        continue;
                    };
                    let f = if s < 0 { Scalar::pi() } else { Scalar::one() };
                    g.coords.iter().map(|y| &f * y).collect()
                }
                r => {
                    fails.push(format!("node {}: image residue {r:?}", e.node));
                    continue;
                }
            };
            if x != want {
                fails.push(format!("node {} at {n:?}: G(b) v+ differs from the module canonical element", e.node));
            }
        }
    }
    Ok(fails)
}
