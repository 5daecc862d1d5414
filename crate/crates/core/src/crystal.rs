//! Crystal lattices and crystal bases, built breadth-first from the top vector.
//!
//! At each depth the lattice is the A-span of the `f~_i`-images of the node lifts one
//! level up. Residues are coordinates at `q = 0` in an echelon basis of that span, and
//! two images are the same node when their residues agree up to a factor `pi`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::CartanDatum;
use crate::error::{QpiError, Result};
use crate::graded::{Depth, Graded, Kashiwara};
use crate::half::{depths_of_height, height, shifted};
use crate::linalg::{axpy, join, rank, scalar_inverse, split_vec, Matrix};
use crate::ratfunc::RatFunc;
use crate::scalar::{PiRational, Scalar};

#[derive(Clone, Debug, Serialize)]
pub struct CrystalNode {
    pub id: usize,
    pub depth: Depth,
    pub parity: u8,
    /// Coordinates at `q = 0` in the echelon basis of the lattice slice.
    #[serde(skip)]
    pub residue: Vec<PiRational>,
    pub eps: Vec<u32>,
    pub phi: Vec<i64>,
    /// `f~_{path[0]} ... f~_{path[k]}` applied to the top vector gives the lift.
    pub path: Vec<usize>,
}

/// `f~_i(src) = dst` when `sign = 1`, and `pi dst` when `sign = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub i: usize,
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct Slice {
    pub depth: Depth,
    pub nodes: Vec<usize>,
    /// Node lifts as columns, in module coordinates.
    pub lifts: Matrix<Scalar>,
    pub lifts_inv: Matrix<Scalar>,
}

/// Position of a lattice vector relative to the nodes of a slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residue {
    Zero,
    /// `sign * node` modulo `qL`.
    Node(usize, i8),
    /// In the lattice, but not `0` or a node up to `pi`.
    Other(Vec<PiRational>),
    OutsideLattice,
}

impl Residue {
    pub fn node(&self) -> Option<(usize, i8)> {
        match self {
            Residue::Node(b, s) => Some((*b, *s)),
            _ => None,
        }
    }
}

pub struct Crystal<M> {
    kash: Arc<Kashiwara<M>>,
    pub height: usize,
    pub nodes: Vec<CrystalNode>,
    pub edges: Vec<Edge>,
    pub slices: BTreeMap<Depth, Slice>,
    /// `f_next[b][i]`: the signed node `f~_i b`, if nonzero and within height.
    pub f_next: Vec<Vec<Option<(usize, i8)>>>,
    /// `e_prev[b][i]`: the signed node `e~_i b` read off the `f~` edges.
    pub e_prev: Vec<Vec<Option<(usize, i8)>>>,
}

fn pi_unit(r: &PiRational) -> Option<i8> {
    let one = BigRational::one();
    if r.0 != one {
        return None;
    }
    if r.1 == one {
        Some(1)
    } else if r.1 == -one {
        Some(-1)
    } else {
        None
    }
}

fn pi_times(r: &[PiRational]) -> Vec<PiRational> {
    r.iter().map(|(a, b)| (a.clone(), -b.clone())).collect()
}

/// Classify coordinates in a node-lift basis.
pub fn classify(coords: &[Scalar]) -> Residue {
    if coords.iter().any(|c| !c.is_regular_at_zero()) {
        return Residue::OutsideLattice;
    }
    let r: Vec<PiRational> = coords.iter().map(|c| c.eval_at_q0().expect("regular")).collect();
    let nz: Vec<usize> = (0..r.len()).filter(|&k| !(r[k].0.is_zero() && r[k].1.is_zero())).collect();
    match nz.as_slice() {
        [] => Residue::Zero,
        [k] => match pi_unit(&r[*k]) {
            Some(s) => Residue::Node(*k, s),
            None => Residue::Other(r),
        },
        _ => Residue::Other(r),
    }
}

/// An A-basis of the A-span of `gens`, by valuation-minimal pivoting.
pub fn lattice_basis(gens: &[Vec<RatFunc>], d: usize) -> Option<Vec<Vec<RatFunc>>> {
    let nonzero = |v: &Vec<RatFunc>| v.iter().any(|x| !x.is_zero());
    let mut rest: Vec<Vec<RatFunc>> = gens.iter().filter(|v| nonzero(v)).cloned().collect();
    let mut basis = Vec::new();
    for col in 0..d {
        let best = rest
            .iter()
            .enumerate()
            .filter(|(_, v)| !v[col].is_zero())
            .min_by_key(|(_, v)| v[col].valuation().unwrap())
            .map(|(k, _)| k);
        let Some(k) = best else { continue };
        let p = rest.remove(k);
        let pc = p[col].inv().unwrap();
        for r in rest.iter_mut() {
            if !r[col].is_zero() {
                let c = -&(&r[col] * &pc);
                axpy(r, &c, &p);
            }
        }
        rest.retain(nonzero);
        basis.push(p);
    }
    (basis.len() == d && rest.is_empty()).then_some(basis)
}

/// A-basis of the span of Scalar vectors, per specialization.
pub fn scalar_lattice_basis(gens: &[Vec<Scalar>], d: usize) -> Option<Matrix<Scalar>> {
    let (p, m): (Vec<_>, Vec<_>) = gens
        .iter()
        .map(|g| {
            let [a, b] = split_vec(g);
            (a, b)
        })
        .unzip();
    let (bp, bm) = rayon::join(|| lattice_basis(&p, d), || lattice_basis(&m, d));
    let (bp, bm) = (bp?, bm?);
    Some(join(&Matrix::from_cols(&bp, d), &Matrix::from_cols(&bm, d)))
}

struct Pending {
    depth: Depth,
    /// `(parent node, i, lift)`, generation order.
    gens: Vec<(usize, usize, Vec<Scalar>)>,
    /// Per generator: `(class, sign)` or `None` when the residue is zero.
    class_of: Vec<Option<(usize, i8)>>,
    /// Generator index chosen as lift of each class.
    reps: Vec<usize>,
    residues: Vec<Vec<PiRational>>,
    lifts: Matrix<Scalar>,
    lifts_inv: Matrix<Scalar>,
}

impl<M: Graded> Crystal<M> {
    /// Breadth-first construction up to `height`.
    pub fn build(kash: Arc<Kashiwara<M>>, height: usize) -> Result<Self> {
        let module = kash.module().clone();
        if height > module.max_height() {
            return Err(QpiError::CutoffExceeded {
                height,
                cutoff: module.max_height(),
            });
        }
        let r = module.datum().rank();
        let zero = vec![0u32; r];
        if module.dim(&zero)? != 1 {
            return Err(QpiError::CheckFailed("top weight space is not one-dimensional".into()));
        }
        let mut c = Crystal {
            kash: kash.clone(),
            height,
            nodes: vec![CrystalNode {
                id: 0,
                depth: zero.clone(),
                parity: 0,
                residue: vec![(BigRational::one(), BigRational::one())],
                eps: vec![0; r],
                phi: vec![0; r],
                path: Vec::new(),
            }],
            edges: Vec::new(),
            slices: BTreeMap::new(),
            f_next: vec![vec![None; r]],
            e_prev: vec![vec![None; r]],
        };
        c.slices.insert(
            zero.clone(),
            Slice {
                depth: zero,
                nodes: vec![0],
                lifts: Matrix::identity(1),
                lifts_inv: Matrix::identity(1),
            },
        );
        for h in 0..height {
            let depths = depths_of_height(r, h + 1);
            let pending: Vec<Result<Option<Pending>>> =
                depths.par_iter().map(|n| c.grow(n)).collect();
            for p in pending {
                if let Some(p) = p? {
                    c.commit(p);
                }
            }
        }
        c.finish_stats();
        Ok(c)
    }

    fn grow(&self, n: &[u32]) -> Result<Option<Pending>> {
        let module = self.kash.module();
        let d = module.dim(n)?;
        let mut gens = Vec::new();
        for i in 0..n.len() {
            let Some(m) = shifted(n, i, false) else { continue };
            let Some(slice) = self.slices.get(&m) else { continue };
            let f = self.kash.f_tilde(i, &m)?;
            for (k, &b) in slice.nodes.iter().enumerate() {
                let g = f.mul_vec(&slice.lifts.col(k));
                if g.iter().any(|x| !x.is_zero()) {
                    gens.push((b, i, g));
                }
            }
        }
        if d == 0 {
            return Ok(None);
        }
        if gens.is_empty() {
            return Err(QpiError::CheckFailed(format!(
                "no f~-images reach depth {n:?} of dimension {d}"
            )));
        }
        let vecs: Vec<Vec<Scalar>> = gens.iter().map(|g| g.2.clone()).collect();
        let basis = scalar_lattice_basis(&vecs, d).ok_or_else(|| {
            QpiError::CheckFailed(format!("f~-images do not span the weight space at depth {n:?}"))
        })?;
        let binv = scalar_inverse(&basis).expect("echelon basis is invertible");
        let mut residues: Vec<Vec<PiRational>> = Vec::new();
        let mut reps = Vec::new();
        let mut class_of = Vec::with_capacity(gens.len());
        for (k, g) in vecs.iter().enumerate() {
            let c = binv.mul_vec(g);
            let res: Vec<PiRational> = c
                .iter()
                .map(|x| x.eval_at_q0())
                .collect::<Result<_>>()
                .map_err(|_| QpiError::CheckFailed(format!("generator outside its own lattice at {n:?}")))?;
            if res.iter().all(|(a, b)| a.is_zero() && b.is_zero()) {
                class_of.push(None);
                continue;
            }
            let flipped = pi_times(&res);
            let hit = residues.iter().enumerate().find_map(|(j, r)| {
                if *r == res {
                    Some((j, 1))
                } else if *r == flipped {
                    Some((j, -1))
                } else {
                    None
                }
            });
            match hit {
                Some(x) => class_of.push(Some(x)),
                None => {
                    class_of.push(Some((residues.len(), 1)));
                    residues.push(res);
                    reps.push(k);
                }
            }
        }
        let independent = residues.len() == d && {
            let rm = |sel: fn(&PiRational) -> &BigRational| {
                Matrix::from_fn(d, d, |row, col| sel(&residues[col][row]).clone())
            };
            rank(&rm(|x| &x.0)) == d && rank(&rm(|x| &x.1)) == d
        };
        if !independent {
            return Err(QpiError::CheckFailed(format!(
                "residues at depth {n:?} do not form a pi-basis ({} classes, dimension {d})",
                residues.len()
            )));
        }
        let lifts = Matrix::from_cols(&reps.iter().map(|&k| vecs[k].clone()).collect::<Vec<_>>(), d);
        let lifts_inv = scalar_inverse(&lifts).expect("lifts with independent residues");
        Ok(Some(Pending {
            depth: n.to_vec(),
            gens,
            class_of,
            reps,
            residues,
            lifts,
            lifts_inv,
        }))
    }

    fn commit(&mut self, p: Pending) {
        let r = p.depth.len();
        let base = self.nodes.len();
        let datum = self.kash.module().datum().clone();
        for (c, &k) in p.reps.iter().enumerate() {
            let (parent, i, _) = &p.gens[k];
            let mut path = vec![*i];
            path.extend(&self.nodes[*parent].path);
            self.nodes.push(CrystalNode {
                id: base + c,
                depth: p.depth.clone(),
                parity: datum.depth_parity(&p.depth),
                residue: p.residues[c].clone(),
                eps: vec![0; r],
                phi: vec![0; r],
                path,
            });
            self.f_next.push(vec![None; r]);
            self.e_prev.push(vec![None; r]);
        }
        for (k, (parent, i, _)) in p.gens.iter().enumerate() {
            if let Some((c, sign)) = p.class_of[k] {
                let dst = base + c;
                self.edges.push(Edge {
                    src: *parent,
                    dst,
                    i: *i,
                    sign,
                });
                self.f_next[*parent][*i] = Some((dst, sign));
                self.e_prev[dst][*i] = Some((*parent, sign));
            }
        }
        self.slices.insert(
            p.depth.clone(),
            Slice {
                depth: p.depth,
                nodes: (base..base + p.reps.len()).collect(),
                lifts: p.lifts,
                lifts_inv: p.lifts_inv,
            },
        );
    }

    fn finish_stats(&mut self) {
        let module = self.kash.module().clone();
        let r = module.datum().rank();
        for b in 0..self.nodes.len() {
            for i in 0..r {
                let e = match self.e_prev[b][i] {
                    Some((src, _)) => self.nodes[src].eps[i] + 1,
                    None => 0,
                };
                self.nodes[b].eps[i] = e;
                self.nodes[b].phi[i] = module.pairing(&self.nodes[b].depth, i) + e as i64;
            }
        }
        self.edges.sort_by_key(|e| (e.src, e.i));
    }

    pub fn kashiwara(&self) -> &Arc<Kashiwara<M>> {
        &self.kash
    }

    pub fn module(&self) -> &Arc<M> {
        self.kash.module()
    }

    pub fn datum(&self) -> &CartanDatum {
        self.kash.module().datum()
    }

    pub fn slice(&self, n: &[u32]) -> Option<&Slice> {
        self.slices.get(n)
    }

    pub fn nodes_at(&self, n: &[u32]) -> &[usize] {
        self.slices.get(n).map(|s| s.nodes.as_slice()).unwrap_or(&[])
    }

    /// Lift of node `b` in module coordinates.
    pub fn lift(&self, b: usize) -> Vec<Scalar> {
        let s = &self.slices[&self.nodes[b].depth];
        let k = s.nodes.iter().position(|&x| x == b).unwrap();
        s.lifts.col(k)
    }

    /// Coordinates of a vector at depth `n` in the node lifts.
    pub fn coords(&self, n: &[u32], v: &[Scalar]) -> Vec<Scalar> {
        match self.slices.get(n) {
            Some(s) => s.lifts_inv.mul_vec(v),
            None => Vec::new(),
        }
    }

    /// Residue class of a vector at depth `n`, with node ids.
    pub fn residue(&self, n: &[u32], v: &[Scalar]) -> Residue {
        match classify(&self.coords(n, v)) {
            Residue::Node(k, s) => Residue::Node(self.slices[n].nodes[k], s),
            other => other,
        }
    }

    /// Whether `v` at depth `n` lies in `q L`.
    pub fn in_q_lattice(&self, n: &[u32], v: &[Scalar]) -> bool {
        self.coords(n, v)
            .iter()
            .all(|c| c.valuation().0.map_or(true, |x| x >= 1))
    }

    /// Node reached by following `f~`-edges along `path` from the top, with its sign.
    pub fn follow(&self, path: &[usize]) -> Option<(usize, i8)> {
        let mut b = 0;
        let mut sign = 1i8;
        for &i in path.iter().rev() {
            let (nb, s) = self.f_next[b][i]?;
            b = nb;
            sign *= s;
        }
        Some((b, sign))
    }

    /// Polarization of node lifts at `q = 0`, as a matrix over Q^pi.
    pub fn residue_gram(&self, n: &[u32]) -> Result<Matrix<Scalar>> {
        let s = &self.slices[n];
        let g = self.kash.module().gram(n)?;
        let gl = s.lifts.transpose().mul(&g).mul(&s.lifts);
        let mut out = Matrix::zeros(gl.rows(), gl.cols());
        for r in 0..gl.rows() {
            for c in 0..gl.cols() {
                let v = gl.get(r, c).eval_at_q0().map_err(|_| {
                    QpiError::CheckFailed(format!("lattice pairing not in A at depth {n:?}"))
                })?;
                out.set(r, c, Scalar::from_pi_rational(&v));
            }
        }
        Ok(out)
    }

    /// Number of nodes at each depth.
    pub fn character(&self) -> BTreeMap<Depth, usize> {
        self.slices.iter().map(|(n, s)| (n.clone(), s.nodes.len())).collect()
    }

    pub fn max_depth_height(&self) -> usize {
        self.slices.keys().map(|n| height(n)).max().unwrap_or(0)
    }
}

