//! Tensor products of graded modules under the coproducts Delta and Delta'.
//!
//! The weight space at depth `n` is the sum of blocks `A_{n1} (x) B_{n2}`, `n1 + n2 = n`,
//! ordered by `n1`; inside a block, `a (x) b` sits at `a * dim B_{n2} + b`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::cartan::CartanDatum;
use crate::crystal::{classify, Crystal, Residue};
use crate::error::{QpiError, Result};
use crate::graded::{Depth, Graded};
use crate::half::shifted;
use crate::linalg::{scalar_inverse, scalar_nullspace, Matrix};
use crate::module::HighestWeightModule;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Coproduct {
    Delta,
    DeltaPrime,
}

#[derive(Clone, Debug)]
pub struct Block {
    pub left: Depth,
    pub right: Depth,
    pub offset: usize,
    pub dim_left: usize,
    pub dim_right: usize,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.dim_left * self.dim_right
    }
}

pub struct TensorModule<A, B> {
    a: Arc<A>,
    b: Arc<B>,
    flag: Coproduct,
    top: Vec<i64>,
    blocks: Mutex<HashMap<Depth, Arc<Vec<Block>>>>,
}

fn add_depths(x: &[u32], y: &[u32]) -> Depth {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

impl<A: Graded, B: Graded> TensorModule<A, B> {
    pub fn new(a: Arc<A>, b: Arc<B>, flag: Coproduct) -> Result<Self> {
        if a.datum() != b.datum() {
            return Err(QpiError::ModuleMismatch);
        }
        let top = a.top().iter().zip(b.top()).map(|(x, y)| x + y).collect();
        Ok(TensorModule {
            a,
            b,
            flag,
            top,
            blocks: Mutex::new(HashMap::new()),
        })
    }

    pub fn left(&self) -> &Arc<A> {
        &self.a
    }

    pub fn right(&self) -> &Arc<B> {
        &self.b
    }

    pub fn flag(&self) -> Coproduct {
        self.flag
    }

    pub fn blocks(&self, n: &[u32]) -> Result<Arc<Vec<Block>>> {
        if let Some(b) = self.blocks.lock().unwrap().get(n) {
            return Ok(b.clone());
        }
        let mut out = Vec::new();
        let mut offset = 0;
        for left in self.a.depths() {
            if left.iter().zip(n).any(|(x, y)| x > y) {
                continue;
            }
            let right: Depth = n.iter().zip(&left).map(|(x, y)| x - y).collect();
            let (da, db) = (self.a.dim(&left)?, self.b.dim(&right)?);
            if da == 0 || db == 0 {
                continue;
            }
            out.push(Block {
                left,
                right,
                offset,
                dim_left: da,
                dim_right: db,
            });
            offset += da * db;
        }
        let out = Arc::new(out);
        self.blocks.lock().unwrap().insert(n.to_vec(), out.clone());
        Ok(out)
    }

    fn block_index(blocks: &[Block], left: &[u32]) -> Option<usize> {
        blocks.iter().position(|b| b.left == left)
    }

    /// Coordinates of `x (x) y` for `x` at depth `n1` of the left factor and `y` at `n2`.
    pub fn pure(&self, n1: &[u32], x: &[Scalar], n2: &[u32], y: &[Scalar]) -> Result<(Depth, Vec<Scalar>)> {
        let n = add_depths(n1, n2);
        let bl = self.blocks(&n)?;
        let d: usize = bl.iter().map(|b| b.dim()).sum();
        let mut v = vec![Scalar::zero(); d];
        if let Some(k) = Self::block_index(&bl, n1) {
            let b = &bl[k];
            for (ia, xa) in x.iter().enumerate() {
                for (ib, yb) in y.iter().enumerate() {
                    v[b.offset + ia * b.dim_right + ib] = xa * yb;
                }
            }
        }
        Ok((n, v))
    }

    /// Assemble a map from depth `n` to depth `m` out of block maps.
    fn assemble(
        &self,
        n: &[u32],
        m: &[u32],
        mut block_map: impl FnMut(&Block) -> Result<Vec<(Depth, Matrix<Scalar>)>>,
    ) -> Result<Matrix<Scalar>> {
        let src = self.blocks(n)?;
        let dst = self.blocks(m)?;
        let rows: usize = dst.iter().map(|b| b.dim()).sum();
        let cols: usize = src.iter().map(|b| b.dim()).sum();
        let mut out = Matrix::zeros(rows, cols);
        for b in src.iter() {
            for (left, x) in block_map(b)? {
                if x.rows() == 0 {
                    continue;
                }
                let k = Self::block_index(&dst, &left).expect("target block");
                out.write_block(dst[k].offset, b.offset, &x);
            }
        }
        Ok(out)
    }

    fn sign(&self, i: usize, left: &[u32]) -> Scalar {
        let d = self.a.datum();
        Scalar::pi_pow(d.p(i) * self.a.parity(left) as i64)
    }
}

impl<A: Graded, B: Graded> Graded for TensorModule<A, B> {
    fn datum(&self) -> &CartanDatum {
        self.a.datum()
    }

    fn top(&self) -> &[i64] {
        &self.top
    }

    fn max_height(&self) -> usize {
        self.a.max_height().min(self.b.max_height())
    }

    fn dim(&self, n: &[u32]) -> Result<usize> {
        self.check_height(n)?;
        Ok(self.blocks(n)?.iter().map(|b| b.dim()).sum())
    }

    /// `Delta(F_i) = F_i (x) 1 + K~_i (x) F_i`, with `J~_i K~_i` for Delta'.
    fn lower(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>> {
        let m = shifted(n, i, true).unwrap();
        self.check_height(&m)?;
        let datum = self.datum().clone();
        self.assemble(n, &m, |b| {
            let mut out = Vec::new();
            let up = shifted(&b.left, i, true).unwrap();
            let fa = self.a.lower(i, &b.left)?;
            if fa.rows() > 0 {
                out.push((up, fa.kron(&Matrix::identity(b.dim_right))));
            }
            let fb = self.b.lower(i, &b.right)?;
            if fb.rows() > 0 {
                let a = self.a.pairing(&b.left, i);
                let pe = if self.flag == Coproduct::DeltaPrime { a } else { 0 };
                let c = &self.sign(i, &b.left) * &datum.pi_q(i, pe, a);
                out.push((b.left.clone(), Matrix::identity(b.dim_left).kron(&fb).scale(&c)));
            }
            Ok(out)
        })
    }

    /// `Delta(E_i) = E_i (x) K~_i^{-1} + J~_i (x) E_i`, without `J~_i` for Delta'.
    fn raise(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>> {
        let Some(m) = shifted(n, i, false) else {
            return Ok(Matrix::zeros(0, self.dim(n)?));
        };
        let datum = self.datum().clone();
        self.assemble(n, &m, |b| {
            let mut out = Vec::new();
            if let Some(down) = shifted(&b.left, i, false) {
                let ea = self.a.raise(i, &b.left)?;
                if ea.rows() > 0 {
                    let c = datum.pi_q(i, 0, -self.b.pairing(&b.right, i));
                    out.push((down, ea.kron(&Matrix::identity(b.dim_right)).scale(&c)));
                }
            }
            if b.right[i] > 0 {
                let eb = self.b.raise(i, &b.right)?;
                if eb.rows() > 0 {
                    let pe = if self.flag == Coproduct::Delta { self.a.pairing(&b.left, i) } else { 0 };
                    let c = &self.sign(i, &b.left) * &datum.pi_q(i, pe, 0);
                    out.push((b.left.clone(), Matrix::identity(b.dim_left).kron(&eb).scale(&c)));
                }
            }
            Ok(out)
        })
    }

    /// The product form `(a (x) b, a' (x) b') = (a, a')(b, b')`.
    fn gram(&self, n: &[u32]) -> Result<Matrix<Scalar>> {
        let bl = self.blocks(n)?;
        let d: usize = bl.iter().map(|b| b.dim()).sum();
        let mut g = Matrix::zeros(d, d);
        for b in bl.iter() {
            let x = self.a.gram(&b.left)?.kron(&self.b.gram(&b.right)?);
            g.write_block(b.offset, b.offset, &x);
        }
        Ok(g)
    }

    fn depths(&self) -> Vec<Depth> {
        let mut out: Vec<Depth> = Vec::new();
        let right = self.b.depths();
        let top = self.max_height();
        for l in self.a.depths() {
            for r in &right {
                let n = add_depths(&l, r);
                if crate::half::height(&n) <= top {
                    out.push(n);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// The lattice `L (x) L'` with basis `b (x) b'` of node lifts.
pub struct TensorLattice<'a, A, B> {
    pub tensor: &'a TensorModule<A, B>,
    pub left: &'a Crystal<A>,
    pub right: &'a Crystal<B>,
}

impl<'a, A: Graded, B: Graded> TensorLattice<'a, A, B> {
    pub fn new(tensor: &'a TensorModule<A, B>, left: &'a Crystal<A>, right: &'a Crystal<B>) -> Self {
        TensorLattice { tensor, left, right }
    }

    /// Node pairs at depth `n`, in coordinate order.
    pub fn pairs(&self, n: &[u32]) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for b in self.tensor.blocks(n)?.iter() {
            for &x in self.left.nodes_at(&b.left) {
                for &y in self.right.nodes_at(&b.right) {
                    out.push((x, y));
                }
            }
        }
        Ok(out)
    }

    /// Lift of `b (x) b'` in tensor coordinates.
    pub fn lift(&self, x: usize, y: usize) -> Result<(Depth, Vec<Scalar>)> {
        let (nx, ny) = (&self.left.nodes[x].depth, &self.right.nodes[y].depth);
        self.tensor.pure(nx, &self.left.lift(x), ny, &self.right.lift(y))
    }

    /// Coordinates of a tensor vector in the lifts of node pairs.
    pub fn coords(&self, n: &[u32], v: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut out = Vec::with_capacity(v.len());
        for b in self.tensor.blocks(n)?.iter() {
            let (Some(sa), Some(sb)) = (self.left.slice(&b.left), self.right.slice(&b.right)) else {
                return Err(QpiError::CheckFailed(format!("no crystal slice for block at depth {n:?}")));
            };
            let inv = sa.lifts_inv.kron(&sb.lifts_inv);
            out.extend(inv.mul_vec(&v[b.offset..b.offset + b.dim()]));
        }
        Ok(out)
    }

    /// Residue with node pairs in place of positions.
    pub fn residue(&self, n: &[u32], v: &[Scalar]) -> Result<TensorResidue> {
        let pairs = self.pairs(n)?;
        Ok(match classify(&self.coords(n, v)?) {
            Residue::Zero => TensorResidue::Zero,
            Residue::Node(k, s) => TensorResidue::Pair(pairs[k], s),
            _ => TensorResidue::Other,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TensorResidue {
    Zero,
    Pair((usize, usize), i8),
    /// Not a single signed basis element, or not in the lattice.
    Other,
}

/// The rule for `f~_i` (`up`) or `e~_i` on `b (x) b'`, with its `pi_i^{p(b)}` sign.
pub fn tensor_rule<A: Graded, B: Graded>(
    left: &Crystal<A>,
    right: &Crystal<B>,
    x: usize,
    y: usize,
    i: usize,
    up: bool,
) -> TensorResidue {
    let datum = left.datum();
    let (bx, by) = (&left.nodes[x], &right.nodes[y]);
    let twist: i8 = if datum.is_odd(i) && bx.parity == 1 { -1 } else { 1 };
    let phi = bx.phi[i];
    let eps = by.eps[i] as i64;
    let on_left = if up { phi > eps } else { phi >= eps };
    let step = |next: &Vec<Vec<Option<(usize, i8)>>>, b: usize| next[b][i];
    if on_left {
        let nxt = if up { step(&left.f_next, x) } else { step(&left.e_prev, x) };
        match nxt {
            Some((b, s)) => TensorResidue::Pair((b, y), s),
            None => TensorResidue::Zero,
        }
    } else {
        let nxt = if up { step(&right.f_next, y) } else { step(&right.e_prev, y) };
        match nxt {
            Some((b, s)) => TensorResidue::Pair((x, b), s * twist),
            None => TensorResidue::Zero,
        }
    }
}

/// Comparison of the rule with the algebraic operators on every node pair.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RuleReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl RuleReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn check_tensor_rule<A: Graded, B: Graded>(
    lat: &TensorLattice<'_, A, B>,
    kash: &crate::graded::Kashiwara<TensorModule<A, B>>,
) -> Result<RuleReport> {
    let mut rep = RuleReport::default();
    let rank = lat.tensor.datum().rank();
    for n in lat.tensor.depths() {
        for (x, y) in lat.pairs(&n)? {
            let (_, v) = lat.lift(x, y)?;
            for i in 0..rank {
                for up in [true, false] {
                    let target = if up { shifted(&n, i, true) } else { shifted(&n, i, false) };
                    let got = match &target {
                        None => TensorResidue::Zero,
                        Some(t) if lat.tensor.dim(t)? == 0 => TensorResidue::Zero,
                        Some(t) => {
                            let w = if up { kash.apply_f(i, &n, &v)? } else { kash.apply_e(i, &n, &v)? };
                            lat.residue(t, &w)?
                        }
                    };
                    let want = tensor_rule(lat.left, lat.right, x, y, i, up);
                    rep.checked += 1;
                    if got != want {
                        rep.mismatches.push(format!(
                            "{} {} on ({x}, {y}) at depth {n:?}: operator gives {got:?}, rule gives {want:?}",
                            if up { "f" } else { "e" },
                            i + 1
                        ));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// The module map from V into a graded module sending `v+` to `seed` at depth `shift`,
/// by `F_j c -> F_j (image of c)`. Keys are depths of V.
pub fn highest_weight_map<M: Graded>(
    target: &M,
    v: &HighestWeightModule,
    shift: &[u32],
    seed: &[Scalar],
) -> Result<BTreeMap<Depth, Matrix<Scalar>>> {
    let mut out: BTreeMap<Depth, Matrix<Scalar>> = BTreeMap::new();
    let mut order: Vec<Depth> = Graded::depths(v);
    order.sort_by_key(|n| (crate::half::height(n), n.clone()));
    for n in order {
        let tn = add_depths(&n, shift);
        let dt = target.dim(&tn)?;
        let s = v.space(&n).unwrap();
        let cols: Vec<Vec<Scalar>> = if crate::half::height(&n) == 0 {
            vec![seed.to_vec()]
        } else {
            let mut cols = Vec::with_capacity(s.dim());
            for &(j, c) in &s.parents {
                let below = shifted(&n, j, false).unwrap();
                let x = out[&below].col(c);
                let tb = add_depths(&below, shift);
                cols.push(target.lower(j, &tb)?.mul_vec(&x));
            }
            cols
        };
        out.insert(n, Matrix::from_cols(&cols, dt));
    }
    Ok(out)
}

/// Whether a depth-indexed family of maps from V intertwines every `E_i` and `F_i`.
pub fn intertwines<M: Graded>(
    target: &M,
    v: &HighestWeightModule,
    shift: &[u32],
    maps: &BTreeMap<Depth, Matrix<Scalar>>,
) -> Result<bool> {
    let rank = v.datum().rank();
    for (n, phi) in maps {
        let tn = add_depths(n, shift);
        for i in 0..rank {
            if let Some(below) = shifted(n, i, false) {
                let lhs = target.raise(i, &tn)?.mul(phi);
                let rhs = match maps.get(&below) {
                    Some(pb) => pb.mul(&v.e_matrix(i, n)),
                    None => Matrix::zeros(lhs.rows(), lhs.cols()),
                };
                if lhs != rhs {
                    return Ok(false);
                }
            } else if tn[i] > 0 {
                // E_i v = 0 at the top of the shifted copy
                if !target.raise(i, &tn)?.mul(phi).is_zero() {
                    return Ok(false);
                }
            }
            let up = shifted(n, i, true).unwrap();
            let tu = add_depths(&up, shift);
            if crate::half::height(&tu) > target.max_height() {
                continue;
            }
            let lhs = target.lower(i, &tn)?.mul(phi);
            let rhs = match maps.get(&up) {
                Some(pu) => pu.mul(&v.f_matrix(i, n)),
                None => Matrix::zeros(lhs.rows(), lhs.cols()),
            };
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Phi, Psi and S between V(lambda + mu) and V(lambda) (x) V(mu).
pub struct TensorMaps {
    pub phi: BTreeMap<Depth, Matrix<Scalar>>,
    pub psi: BTreeMap<Depth, Matrix<Scalar>>,
    pub s: BTreeMap<Depth, Matrix<Scalar>>,
}

impl TensorMaps {
    pub fn new(
        t: &TensorModule<HighestWeightModule, HighestWeightModule>,
        sum: &HighestWeightModule,
    ) -> Result<Self> {
        let rank = t.datum().rank();
        let zero = vec![0u32; rank];
        let phi = highest_weight_map(t, sum, &zero, &[Scalar::one()])?;

        // complement of im Phi: the submodule generated by singular vectors below the top
        let mut comp: BTreeMap<Depth, Vec<Vec<Scalar>>> = BTreeMap::new();
        let mut psi = BTreeMap::new();
        let mut order = t.depths();
        order.retain(|n| crate::half::height(n) <= sum.max_height());
        order.sort_by_key(|n| (crate::half::height(n), n.clone()));
        for n in &order {
            let d = t.dim(n)?;
            if d == 0 {
                continue;
            }
            let mut c: Vec<Vec<Scalar>> = Vec::new();
            if crate::half::height(n) > 0 {
                for j in 0..rank {
                    if let Some(below) = shifted(n, j, false) {
                        if let Some(cb) = comp.get(&below) {
                            let f = t.lower(j, &below)?;
                            c.extend(cb.iter().map(|x| f.mul_vec(x)));
                        }
                    }
                }
                let stacked: Vec<Matrix<Scalar>> = (0..rank)
                    .filter(|&i| n[i] > 0)
                    .map(|i| t.raise(i, n))
                    .collect::<Result<_>>()?;
                let refs: Vec<&Matrix<Scalar>> = stacked.iter().collect();
                let e = Matrix::vstack(&refs, d);
                let sing = scalar_nullspace(&e)
                    .ok_or_else(|| QpiError::CheckFailed(format!("singular vectors at {n:?} differ by specialization")))?;
                c.extend(sing);
            }
            let c = independent(&c, d)?;
            let ph = phi.get(n).cloned().unwrap_or_else(|| Matrix::zeros(d, 0));
            if ph.cols() + c.len() != d {
                return Err(QpiError::CheckFailed(format!(
                    "image of Phi and the complement do not span at depth {n:?}"
                )));
            }
            let mut cols: Vec<Vec<Scalar>> = (0..ph.cols()).map(|k| ph.col(k)).collect();
            cols.extend(c.iter().cloned());
            let inv = scalar_inverse(&Matrix::from_cols(&cols, d))
                .ok_or_else(|| QpiError::CheckFailed(format!("image of Phi meets its complement at {n:?}")))?;
            if ph.cols() > 0 {
                psi.insert(n.clone(), inv.block(0, 0, ph.cols(), d));
            }
            comp.insert(n.clone(), c);
        }

        // S: identity on the blocks whose second factor sits at the top
        let mut s = BTreeMap::new();
        for n in &order {
            let bl = t.blocks(n)?;
            let d: usize = bl.iter().map(|b| b.dim()).sum();
            let Some(b) = bl.iter().find(|b| b.right.iter().all(|&x| x == 0)) else {
                continue;
            };
            let mut m = Matrix::zeros(b.dim_left, d);
            for k in 0..b.dim_left {
                m.set(k, b.offset + k, Scalar::one());
            }
            s.insert(n.clone(), m);
        }
        Ok(TensorMaps { phi, psi, s })
    }

    /// `Psi o Phi` is the identity at every depth.
    pub fn psi_phi_identity(&self) -> bool {
        self.phi.iter().all(|(n, ph)| match self.psi.get(n) {
            Some(ps) => ps.mul(ph) == Matrix::identity(ph.cols()),
            None => ph.cols() == 0,
        })
    }
}

/// An independent subset of `vecs` spanning the same space.
fn independent(vecs: &[Vec<Scalar>], d: usize) -> Result<Vec<Vec<Scalar>>> {
    let sel = crate::linalg::IndependentImages::select(vecs, d)
        .ok_or_else(|| QpiError::CheckFailed("specializations disagree on a rank".into()))?;
    Ok(sel.chosen.iter().map(|&k| vecs[k].clone()).collect())
}

/// Adjunction of `Delta(u)` against `Delta'(tau_1(u))` (or `Delta` on both sides) on `M (x) N`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PolarizationReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl PolarizationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn j_polarization_check<A: Graded, B: Graded>(
    m: &Arc<A>,
    n: &Arc<B>,
    right_flag: Coproduct,
) -> Result<PolarizationReport> {
    let t = TensorModule::new(m.clone(), n.clone(), Coproduct::Delta)?;
    let t2 = TensorModule::new(m.clone(), n.clone(), right_flag)?;
    let datum = t.datum().clone();
    let mut rep = PolarizationReport::default();
    for depth in t.depths() {
        if t.dim(&depth)? == 0 {
            continue;
        }
        let g = t.gram(&depth)?;
        for i in 0..datum.rank() {
            let a = t.pairing(&depth, i);
            let up = shifted(&depth, i, true).unwrap();
            if crate::half::height(&up) <= t.max_height() && t.dim(&up)? > 0 {
                // tau_1(F_i) = q_i^{-1} K~_i E_i
                let lhs = t.lower(i, &depth)?.transpose().mul(&t.gram(&up)?);
                let rhs = g.mul(&t2.raise(i, &up)?).scale(&datum.pi_q(i, 0, a - 1));
                rep.checked += 1;
                if lhs != rhs {
                    rep.failures.push(format!("F_{} at depth {depth:?}", i + 1));
                }
            }
            if let Some(down) = shifted(&depth, i, false) {
                if t.dim(&down)? > 0 {
                    // tau_1(E_i) = q_i^{-1} K~_i^{-1} F_i
                    let lhs = t.raise(i, &depth)?.transpose().mul(&t.gram(&down)?);
                    let rhs = g.mul(&t2.lower(i, &down)?).scale(&datum.pi_q(i, 0, -a - 1));
                    rep.checked += 1;
                    if lhs != rhs {
                        rep.failures.push(format!("E_{} at depth {depth:?}", i + 1));
                    }
                }
            }
        }
    }
    Ok(rep)
}
