//! Mechanical checks of crystal-basis statements on computed weight spaces.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::cartan::CartanDatum;
use crate::crystal::{scalar_lattice_basis, Crystal, Residue};
use crate::error::Result;
use crate::graded::{Depth, Graded, Kashiwara};
use crate::half::{height, shifted, HalfAlgebra};
use crate::linalg::{dot, scalar_inverse, Matrix};
use crate::module::{HighestWeightModule, DEFAULT_BUDGET};
use crate::projection::Projection;
use crate::scalar::Scalar;
use crate::tensor::{Coproduct, TensorLattice, TensorMaps, TensorModule};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, o: Report) {
        self.checked += o.checked;
        self.failures.extend(o.failures);
    }
}

fn regular(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_regular_at_zero())
}

fn unimodular(m: &Matrix<Scalar>) -> bool {
    m.entries().iter().all(|x| x.is_regular_at_zero())
        && scalar_inverse(m).is_some_and(|i| i.entries().iter().all(|x| x.is_regular_at_zero()))
}

/// `e~_i` of a node lift, as a residue in the same crystal.
pub fn e_residue<M: Graded>(c: &Crystal<M>, b: usize, i: usize) -> Result<Residue> {
    let n = &c.nodes[b].depth;
    let Some(m) = shifted(n, i, false) else {
        return Ok(Residue::Zero);
    };
    if c.module().dim(&m)? == 0 {
        return Ok(Residue::Zero);
    }
    let v = c.kashiwara().apply_e(i, n, &c.lift(b))?;
    Ok(c.residue(&m, &v))
}

/// `f~_i` of a node lift, or `None` past the crystal's height.
pub fn f_residue<M: Graded>(c: &Crystal<M>, b: usize, i: usize) -> Result<Option<Residue>> {
    let n = &c.nodes[b].depth;
    let m = shifted(n, i, true).unwrap();
    if height(&m) > c.height {
        return Ok(None);
    }
    if c.module().dim(&m)? == 0 {
        return Ok(Some(Residue::Zero));
    }
    let v = c.kashiwara().apply_f(i, n, &c.lift(b))?;
    Ok(Some(c.residue(&m, &v)))
}

fn signed(r: &Residue) -> Option<Option<(usize, i8)>> {
    match r {
        Residue::Zero => Some(None),
        Residue::Node(b, s) => Some(Some((*b, *s))),
        _ => None,
    }
}

/// Axioms (4)-(7) of a crystal basis and the string statistics, on every built slice.
/// `complete` asks for `phi_i(b) = max{n : f~_i^n b != 0}` as well.
pub fn crystal_axioms<M: Graded>(c: &Crystal<M>, complete: bool) -> Result<Report> {
    let mut rep = Report::default();
    let module = c.module();
    let rank = c.datum().rank();
    for (n, s) in &c.slices {
        let d = module.dim(n)?;
        rep.record(s.nodes.len() == d, || {
            format!("{} nodes for dimension {d} at depth {n:?}", s.nodes.len())
        });
        for &b in &s.nodes {
            rep.record(&c.nodes[b].depth == n, || format!("node {b} filed under depth {n:?}"));
        }
    }
    for b in 0..c.nodes.len() {
        for i in 0..rank {
            let e = e_residue(c, b, i)?;
            let es = signed(&e);
            rep.record(es.is_some(), || format!("e~_{} of node {b} is {e:?}", i + 1));
            let f = f_residue(c, b, i)?;
            if let Some(f) = &f {
                let fs = signed(f);
                rep.record(fs.is_some(), || format!("f~_{} of node {b} is {f:?}", i + 1));
                if let Some(Some((t, s))) = fs {
                    rep.record(c.f_next[b][i] == Some((t, s)), || {
                        format!("f~_{} of node {b} disagrees with the recorded edge", i + 1)
                    });
                }
            }
            if let Some(Some((t, s))) = es {
                rep.record(c.f_next[t][i] == Some((b, s)), || {
                    format!("e~_{} {b} = {t} but f~_{} {t} != {b}", i + 1, i + 1)
                });
            }
            if let Some((t, s)) = c.f_next[b][i] {
                rep.record(signed(&e_residue(c, t, i)?) == Some(Some((b, s))), || {
                    format!("f~_{} {b} = {t} but e~_{} {t} != {b}", i + 1, i + 1)
                });
            }

            let mut eps = 0;
            let mut cur = b;
            while let Some(Some((t, _))) = signed(&e_residue(c, cur, i)?) {
                eps += 1;
                cur = t;
            }
            let node = &c.nodes[b];
            rep.record(node.eps[i] == eps, || format!("eps_{} of node {b}", i + 1));
            rep.record(node.phi[i] == module.pairing(&node.depth, i) + eps as i64, || {
                format!("phi_{} of node {b}", i + 1)
            });
            if complete {
                let mut phi = 0i64;
                let mut cur = b;
                while let Some((t, _)) = c.f_next[cur][i] {
                    phi += 1;
                    cur = t;
                }
                rep.record(node.phi[i] == phi, || format!("f~_{}-string length of node {b}", i + 1));
            }
        }
    }
    Ok(rep)
}

/// Statements (i)-(iv) on the polarization at `q = 0`, for every built slice.
pub fn polarization_properties<M: Graded>(c: &Crystal<M>) -> Result<Report> {
    let mut rep = Report::default();
    let module = c.module();
    let datum = c.datum().clone();
    let mut grams: BTreeMap<Depth, Matrix<Scalar>> = BTreeMap::new();
    for (n, s) in &c.slices {
        let g = module.gram(n)?;
        let gl = s.lifts.transpose().mul(&g).mul(&s.lifts);
        // (i) and (iv): the lattice is its own dual
        rep.record(unimodular(&gl), || format!("lattice at depth {n:?} is not self-dual"));
        // (iii): (b, b)_0 in {1, pi} and (b, b')_0 = 0
        for r in 0..gl.rows() {
            for k in 0..gl.cols() {
                let v = gl.get(r, k);
                let ok = if !v.is_regular_at_zero() {
                    false
                } else {
                    let (p, m) = v.eval_at_q0().unwrap();
                    let (p, m) = (p.to_string(), m.to_string());
                    if r == k {
                        p == "1" && (m == "1" || m == "-1")
                    } else {
                        p == "0" && m == "0"
                    }
                };
                rep.record(ok, || format!("(b, b')_0 at depth {n:?}, entry ({r}, {k})"));
            }
        }
        grams.insert(n.clone(), g);
    }
    // (ii): (f~_i u, v)_0 = pi_i^{eps_i(u)} (u, e~_i v)_0
    let kash = c.kashiwara();
    for (n, s) in &c.slices {
        for i in 0..datum.rank() {
            let up = shifted(n, i, true).unwrap();
            let Some(t) = c.slices.get(&up) else { continue };
            let ft = kash.f_tilde(i, n)?;
            let et = kash.e_tilde(i, &up)?;
            for (ku, &u) in s.nodes.iter().enumerate() {
                let lu = s.lifts.col(ku);
                let fu = ft.mul_vec(&lu);
                for (kv, &v) in t.nodes.iter().enumerate() {
                    let lv = t.lifts.col(kv);
                    let ev = et.mul_vec(&lv);
                    let lhs = dot(&fu, &grams[&up].mul_vec(&lv));
                    let rhs = dot(&lu, &grams[n].mul_vec(&ev));
                    let sign = datum.pi_q(i, c.nodes[u].eps[i] as i64, 0);
                    let ok = match (lhs.eval_at_q0(), (&sign * &rhs).eval_at_q0()) {
                        (Ok(a), Ok(b)) => a == b,
                        _ => false,
                    };
                    rep.record(ok, || format!("adjunction of f~_{} for nodes {u}, {v}", i + 1));
                }
            }
        }
    }
    Ok(rep)
}

/// `rho(L(infinity)) = L(infinity)` on every built slice.
pub fn rho_stability(u: &HalfAlgebra, c: &Crystal<HalfAlgebra>) -> Result<Report> {
    let mut rep = Report::default();
    for (n, s) in &c.slices {
        let mut images = Vec::new();
        for k in 0..s.nodes.len() {
            let x = u.element(n, &s.lifts.col(k))?.rho();
            let y = c.coords(n, &u.coords(&x)?);
            rep.record(regular(&y), || format!("rho of node {} leaves the lattice", s.nodes[k]));
            images.push(y);
        }
        if !images.is_empty() {
            let d = images.len();
            let m = Matrix::from_cols(&images, d);
            rep.record(unimodular(&m), || format!("rho image of the lattice at depth {n:?} is smaller"));
        }
    }
    Ok(rep)
}

/// The series projector against the string decomposition, and `E_i' P = P F_i = 0`.
pub fn boson_projector(u: &HalfAlgebra, kash: &Kashiwara<HalfAlgebra>, height_bound: usize) -> Result<Report> {
    let mut rep = Report::default();
    let datum = u.datum().clone();
    for h in 0..=height_bound {
        for n in crate::half::depths_of_height(datum.rank(), h) {
            let s = u.space(&n)?;
            for k in 0..s.dim() {
                let x = u.element(&n, &Matrix::<Scalar>::identity(s.dim()).col(k))?;
                for i in 0..datum.rank() {
                    let p = u.reduce(&u.boson_projector_series(i, &x))?;
                    let ep = p.e_prime(&datum, i);
                    rep.record(u.is_zero_in_quotient(&ep)?, || {
                        format!("E_{}' P is nonzero on {:?}", i + 1, s.chosen_words[k])
                    });
                    if h < height_bound {
                        let pf = u.boson_projector_series(i, &x.left_f(i));
                        rep.record(u.is_zero_in_quotient(&pf)?, || {
                            format!("P F_{} is nonzero on {:?}", i + 1, s.chosen_words[k])
                        });
                    }
                    let parts = kash.decompose(i, &n, &u.coords(&x)?)?;
                    let zero = vec![Scalar::zero(); s.dim()];
                    let u0 = parts.iter().find(|(t, _)| *t == 0).map_or(zero, |(_, v)| v.clone());
                    rep.record(u.coords(&p)? == u0, || {
                        format!("P differs from the string head for i = {} on {:?}", i + 1, s.chosen_words[k])
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// On every weight space with `n = -<alpha_i^vee, wt> >= 1`:
/// `u = pi_i^{C(n,2)} sum_{k >= n} (-1)^{k-n} [k-1, k-n]_i F_i^(k) E_i^(k) u`.
pub fn divided_power_identity(v: &HighestWeightModule, kash: &Kashiwara<HighestWeightModule>) -> Result<Report> {
    let datum = v.datum();
    let mut rep = Report::default();
    for n in v.depths() {
        let d = v.dim_at(&n);
        if d == 0 || height(&n) > v.max_height() {
            continue;
        }
        for i in 0..datum.rank() {
            let m0 = -v.pairing(&n, i);
            if m0 < 1 {
                continue;
            }
            let mut sum: Matrix<Scalar> = Matrix::zeros(d, d);
            // E_i^k from n to n - k e_i
            let mut ek: Matrix<Scalar> = Matrix::identity(d);
            let mut cur = n.clone();
            for k in 1..=n[i] as i64 {
                ek = v.e_matrix(i, &cur).mul(&ek);
                cur[i] -= 1;
                if k < m0 {
                    continue;
                }
                let e_div = ek.scale(&datum.qfact(i, k as u32).inv()?);
                let f = kash.divided_power(i, &cur, k as u32)?;
                let sign = Scalar::from_int(if (k - m0) % 2 == 0 { 1 } else { -1 });
                let c = &sign * &datum.qbinom(i, k - 1, (k - m0) as u32);
                sum = sum.add(&f.mul(&e_div).scale(&c));
            }
            let lhs = sum.scale(&datum.pi_q(i, m0 * (m0 - 1) / 2, 0));
            rep.record(lhs == Matrix::identity(d), || format!("identity fails at {n:?}, i = {}", i + 1));
        }
    }
    Ok(rep)
}

/// The scalar identity behind the odd case of the divided-power decomposition:
/// `sum_t (-1)^t pi^{(t+n)(r+n) + C(t+n+1,2)} [t+n-1, t] [t+r+n, r] [r+n, t+n] = pi^{C(n,2)}`.
pub fn odd_binomial_identity(r: i64, n: i64) -> bool {
    let b = |a: i64, k: i64| crate::scalar::qpi_binomial(a, k as u32, 1, true);
    let mut acc = Scalar::zero();
    for t in 0..=r {
        let e = (t + n) * (r + n) + (t + n + 1) * (t + n) / 2;
        let sign = Scalar::from_int(if t % 2 == 0 { 1 } else { -1 });
        let term = &(&(&Scalar::pi_pow(e) * &sign) * &b(t + n - 1, t)) * &(&b(t + r + n, r) * &b(r + n, t + n));
        acc = &acc + &term;
    }
    acc == Scalar::pi_pow(n * (n - 1) / 2)
}

/// Everything the grand-loop statements refer to, up to one height.
pub struct GrandLoop {
    pub datum: CartanDatum,
    pub height: usize,
    pub half: Arc<HalfAlgebra>,
    pub binf: Crystal<HalfAlgebra>,
    /// `(lambda, module, crystal, projection)`.
    pub modules: Vec<(Vec<i64>, Arc<HighestWeightModule>, Crystal<HighestWeightModule>, Projection)>,
}

impl GrandLoop {
    /// Built for the given dominant weights and, for the tensor statements,
    /// all sums of two of them.
    pub fn new(datum: &CartanDatum, height: usize, lambdas: &[Vec<i64>]) -> Result<Self> {
        let half = Arc::new(HalfAlgebra::new(datum.clone(), height));
        half.prefetch(height)?;
        let binf = Crystal::build(Arc::new(Kashiwara::new(half.clone())), height)?;
        let mut all: Vec<Vec<i64>> = lambdas.to_vec();
        for a in lambdas {
            for b in lambdas {
                let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if !all.contains(&s) {
                    all.push(s);
                }
            }
        }
        let mut modules = Vec::new();
        for l in all {
            let v = Arc::new(HighestWeightModule::truncated(datum, &l, height, DEFAULT_BUDGET)?);
            let c = Crystal::build(Arc::new(Kashiwara::new(v.clone())), height)?;
            let p = Projection::new(half.clone(), v.clone());
            modules.push((l, v, c, p));
        }
        Ok(GrandLoop {
            datum: datum.clone(),
            height,
            half,
            binf,
            modules,
        })
    }

    fn module(&self, l: &[i64]) -> &(Vec<i64>, Arc<HighestWeightModule>, Crystal<HighestWeightModule>, Projection) {
        self.modules.iter().find(|m| m.0 == l).expect("module was built")
    }

    /// Statements 1-14, each with its report.
    pub fn run(&self, lambdas: &[Vec<i64>]) -> Result<Vec<(usize, Report)>> {
        let binf = &self.binf;
        let rank = self.datum.rank();
        // rep[k] collects statement k
        let mut rep: Vec<Report> = vec![Report::default(); 15];

        // 1, 4, 7 and 14 on B(infinity)
        for (n, s) in &binf.slices {
            rep[4].record(s.nodes.len() == self.half.dim(n)?, || format!("B(inf) at depth {n:?}"));
        }
        for b in 0..binf.nodes.len() {
            for i in 0..rank {
                let e = e_residue(binf, b, i)?;
                rep[1].record(e != Residue::OutsideLattice, || format!("e~_{} of B(inf) node {b}", i + 1));
                rep[7].record(signed(&e).is_some(), || format!("e~_{} of B(inf) node {b} is {e:?}", i + 1));
                if let Residue::Node(t, s) = e {
                    let back = f_residue(binf, t, i)?;
                    rep[14].record(back == Some(Residue::Node(b, s)), || {
                        format!("f~_{} e~_{} of B(inf) node {b} is {back:?}", i + 1, i + 1)
                    });
                }
            }
        }

        for l in lambdas {
            let (_, v, bla, proj) = self.module(l);
            for (n, s) in &bla.slices {
                rep[5].record(s.nodes.len() == v.dim_at(n), || format!("B({l:?}) at depth {n:?}"));
            }
            for b in 0..bla.nodes.len() {
                for i in 0..rank {
                    let e = e_residue(bla, b, i)?;
                    rep[2].record(e != Residue::OutsideLattice, || format!("e~_{} of B({l:?}) node {b}", i + 1));
                    rep[7].record(signed(&e).is_some(), || format!("e~_{} of B({l:?}) node {b} is {e:?}", i + 1));
                    // 13: b = f~_i b' iff b' = e~_i b
                    if let Some(f) = f_residue(bla, b, i)? {
                        if let Residue::Node(t, s) = f {
                            let back = e_residue(bla, t, i)?;
                            rep[13].record(back == Residue::Node(b, s), || {
                                format!("f~_{} {b} = {t} in B({l:?}), but e~_{} {t} is {back:?}", i + 1, i + 1)
                            });
                        }
                    }
                    if let Residue::Node(t, s) = e {
                        let back = f_residue(bla, t, i)?;
                        rep[13].record(back.is_none() || back == Some(Residue::Node(b, s)), || {
                            format!("e~_{} {b} = {t} in B({l:?}), but f~_{} {t} is {back:?}", i + 1, i + 1)
                        });
                    }
                }
            }

            for (n, s) in &binf.slices {
                let dv = v.dim_at(n);
                // 3: the projection carries L(infinity) onto L(lambda)
                let cols: Vec<Vec<Scalar>> = (0..s.nodes.len())
                    .map(|k| proj.apply(n, &s.lifts.col(k)).map(|x| bla.coords(n, &x)))
                    .collect::<Result<_>>()?;
                if dv > 0 {
                    let inside = cols.iter().all(|c| regular(c));
                    let onto = inside
                        && scalar_lattice_basis(&cols, dv).is_some_and(|m| unimodular(&m));
                    rep[3].record(onto, || format!("projection of the lattice at depth {n:?} for {l:?}"));
                }

                // 11: nonzero residues biject onto B(lambda)
                let mut hit: Vec<usize> = Vec::new();
                let mut clean = true;
                for &b in &s.nodes {
                    match proj.project_node(binf, bla, b)? {
                        Residue::Zero => {}
                        Residue::Node(t, _) => hit.push(t),
                        _ => clean = false,
                    }
                }
                hit.sort();
                let want = bla.nodes_at(n).to_vec();
                rep[11].record(clean && hit == want, || format!("projected nodes at depth {n:?} for {l:?}"));

                for &b in &s.nodes {
                    let lift = binf.lift(b);
                    let pb = proj.apply(n, &lift)?;
                    let nonzero = dv > 0 && !matches!(bla.residue(n, &pb), Residue::Zero);
                    for i in 0..rank {
                        // 6: f~_i (x v+) = (f~_i x) v+ mod q L(lambda)
                        let up = shifted(n, i, true).unwrap();
                        if height(&up) <= self.height && v.dim_at(&up) > 0 {
                            let lhs = if dv > 0 { bla.kashiwara().apply_f(i, n, &pb)? } else { vec![Scalar::zero(); v.dim_at(&up)] };
                            let fx = binf.kashiwara().apply_f(i, n, &lift)?;
                            let rhs = proj.apply(&up, &fx)?;
                            let diff: Vec<Scalar> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                            rep[6].record(bla.in_q_lattice(&up, &diff), || {
                                format!("f~_{} and the projection of node {b} for {l:?}", i + 1)
                            });
                        }
                        // 12: e~_i commutes with the projection on nonzero residues
                        if nonzero {
                            if let Some(dn) = shifted(n, i, false) {
                                let lhs = bla.kashiwara().apply_e(i, n, &pb)?;
                                let ex = binf.kashiwara().apply_e(i, n, &lift)?;
                                let rhs = proj.apply(&dn, &ex)?;
                                let (a, c) = if v.dim_at(&dn) == 0 {
                                    (Residue::Zero, Residue::Zero)
                                } else {
                                    (bla.residue(&dn, &lhs), bla.residue(&dn, &rhs))
                                };
                                rep[12].record(a == c && signed(&a).is_some(), || {
                                    format!("e~_{} and the projection of node {b} for {l:?}: {a:?} vs {c:?}", i + 1)
                                });
                            }
                        }
                    }
                }
            }
        }

        // 8, 9, 10 on tensor products
        for a in lambdas {
            for b in lambdas {
                let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let (_, va, ca, _) = self.module(a);
                let (_, vb, cb, _) = self.module(b);
                let (_, vs, cs, _) = self.module(&s);
                let t = TensorModule::new(va.clone(), vb.clone(), Coproduct::Delta)?;
                let maps = TensorMaps::new(&t, vs)?;
                let lat = TensorLattice::new(&t, ca, cb);
                for (n, slice) in &cs.slices {
                    let phi = &maps.phi[n];
                    for k in 0..slice.nodes.len() {
                        let x = phi.mul_vec(&slice.lifts.col(k));
                        let c = lat.coords(n, &x)?;
                        rep[8].record(regular(&c), || {
                            format!("Phi of node {} of B({s:?}) leaves L({a:?}) (x) L({b:?})", slice.nodes[k])
                        });
                    }
                }
                for n in t.depths() {
                    let Some(psi) = maps.psi.get(&n) else { continue };
                    for (x, y) in lat.pairs(&n)? {
                        let (_, w) = lat.lift(x, y)?;
                        let img = psi.mul_vec(&w);
                        let res = cs.residue(&n, &img);
                        rep[9].record(res != Residue::OutsideLattice, || {
                            format!("Psi of ({x}, {y}) leaves L({s:?})")
                        });
                        rep[10].record(signed(&res).is_some(), || {
                            format!("Psi of ({x}, {y}) is {res:?} in B({s:?})")
                        });
                    }
                }
            }
        }
        Ok(rep.into_iter().enumerate().skip(1).collect())
    }
}
