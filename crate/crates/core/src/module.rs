//! Integrable highest-weight modules V(lambda).
//!
//! Weight spaces are built downward from `v+`. A vector below the top is determined
//! by its images under all `E_i`, and `E_i F_j c` follows from the commutation
//! relation, so each candidate `F_j c` is recorded through its stacked `E`-images.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::cartan::CartanDatum;
use crate::error::{QpiError, Result};
use crate::graded::{Depth, Graded};
use crate::half::{depths_of_height, height, shifted, Word};
use crate::linalg::{dot, IndependentImages, Matrix};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: usize = 400;

#[derive(Clone, Debug)]
pub struct ModuleSpace {
    pub depth: Depth,
    /// Basis vector `k` is `F_j` applied to basis vector `c` at `n - e_j`.
    pub parents: Vec<(usize, usize)>,
    /// `F_j` from `n - e_j` into this space.
    pub f: Vec<Option<Matrix<Scalar>>>,
    /// `E_i` from this space to `n - e_i`.
    pub e: Vec<Option<Matrix<Scalar>>>,
    pub gram: Matrix<Scalar>,
}

impl ModuleSpace {
    pub fn dim(&self) -> usize {
        self.parents.len()
    }
}

/// V(lambda), with every nonzero weight space stored.
pub struct HighestWeightModule {
    datum: CartanDatum,
    lambda: Vec<i64>,
    spaces: BTreeMap<Depth, Arc<ModuleSpace>>,
    /// Largest height of a nonzero weight space.
    depth_height: usize,
    /// Height bound for modules that are only partially built.
    truncation: Option<usize>,
}

impl HighestWeightModule {
    pub fn new(datum: &CartanDatum, lambda: &[i64]) -> Result<Self> {
        Self::with_budget(datum, lambda, DEFAULT_BUDGET)
    }

    pub fn with_budget(datum: &CartanDatum, lambda: &[i64], budget: usize) -> Result<Self> {
        Self::build(datum, lambda, budget, None)
    }

    /// Weight spaces up to `height` only, for modules too large to build whole.
    pub fn truncated(datum: &CartanDatum, lambda: &[i64], height: usize, budget: usize) -> Result<Self> {
        Self::build(datum, lambda, budget, Some(height))
    }

    fn build(datum: &CartanDatum, lambda: &[i64], budget: usize, truncation: Option<usize>) -> Result<Self> {
        let r = datum.rank();
        if lambda.len() != r {
            return Err(QpiError::NonDominantWeight(format!(
                "{lambda:?} has {} entries for rank {r}",
                lambda.len()
            )));
        }
        if lambda.iter().any(|&x| x < 0) {
            return Err(QpiError::NonDominantWeight(format!("{lambda:?}")));
        }
        let mut m = HighestWeightModule {
            datum: datum.clone(),
            lambda: lambda.to_vec(),
            spaces: BTreeMap::new(),
            depth_height: 0,
            truncation,
        };
        let top = vec![0; r];
        m.spaces.insert(
            top.clone(),
            Arc::new(ModuleSpace {
                depth: top,
                parents: vec![(usize::MAX, 0)],
                f: vec![None; r],
                e: vec![None; r],
                gram: Matrix::identity(1),
            }),
        );
        let mut total = 1;
        for h in 1..=truncation.unwrap_or(usize::MAX) {
            let level: Vec<Result<Option<ModuleSpace>>> = depths_of_height(r, h)
                .into_par_iter()
                .map(|n| m.build_space(&n))
                .collect();
            let mut any = false;
            for s in level {
                if let Some(s) = s? {
                    total += s.dim();
                    if total > budget {
                        return Err(QpiError::DimensionBudgetExceeded(budget));
                    }
                    any = true;
                    m.spaces.insert(s.depth.clone(), Arc::new(s));
                }
            }
            if !any {
                break;
            }
            m.depth_height = h;
        }
        Ok(m)
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }

    pub fn space(&self, n: &[u32]) -> Option<&Arc<ModuleSpace>> {
        self.spaces.get(n)
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.values().map(|s| s.dim()).sum()
    }

    pub fn depth_height(&self) -> usize {
        self.depth_height
    }

    pub fn is_complete(&self) -> bool {
        self.truncation.map_or(true, |t| self.depth_height < t)
    }

    /// Weight-space dimensions keyed by depth.
    pub fn character(&self) -> BTreeMap<Depth, usize> {
        self.spaces.iter().map(|(n, s)| (n.clone(), s.dim())).collect()
    }

    /// A word `w` with basis vector `k` equal to `F_w v+`.
    pub fn basis_word(&self, n: &[u32], k: usize) -> Word {
        let mut word = Vec::new();
        let mut n = n.to_vec();
        let mut k = k;
        while height(&n) > 0 {
            let (j, c) = self.spaces[&n].parents[k];
            word.push(j);
            n[j] -= 1;
            k = c;
        }
        word
    }

    /// `K~_i` and `J~_i` eigenvalues `q_i^a`, `pi_i^a` on the weight space at `n`.
    pub fn k_tilde(&self, i: usize, n: &[u32]) -> Scalar {
        self.datum.pi_q(i, 0, self.pairing(n, i))
    }

    pub fn j_tilde(&self, i: usize, n: &[u32]) -> Scalar {
        self.datum.pi_q(i, self.pairing(n, i), 0)
    }

    /// Matrix of `E_i` at `n`, zero-sized when the target vanishes.
    pub fn e_matrix(&self, i: usize, n: &[u32]) -> Matrix<Scalar> {
        let d = self.dim_at(n);
        match shifted(n, i, false) {
            Some(t) => match self.spaces.get(n).and_then(|s| s.e[i].clone()) {
                Some(e) => e,
                None => Matrix::zeros(self.dim_at(&t), d),
            },
            None => Matrix::zeros(0, d),
        }
    }

    /// Matrix of `F_i` from `n` to `n + e_i`.
    pub fn f_matrix(&self, i: usize, n: &[u32]) -> Matrix<Scalar> {
        let t = shifted(n, i, true).unwrap();
        match self.spaces.get(&t) {
            Some(s) => s.f[i].clone().unwrap_or_else(|| Matrix::zeros(s.dim(), self.dim_at(n))),
            None => Matrix::zeros(0, self.dim_at(n)),
        }
    }

    pub fn dim_at(&self, n: &[u32]) -> usize {
        self.spaces.get(n).map_or(0, |s| s.dim())
    }

    /// Form value on two coordinate vectors of the same weight space.
    pub fn polarization(&self, n: &[u32], x: &[Scalar], y: &[Scalar]) -> Scalar {
        match self.spaces.get(n) {
            Some(s) => dot(x, &s.gram.mul_vec(y)),
            None => Scalar::zero(),
        }
    }

    fn build_space(&self, n: &[u32]) -> Result<Option<ModuleSpace>> {
        let r = self.datum.rank();
        let datum = &self.datum;
        let pred: Vec<Option<&Arc<ModuleSpace>>> = (0..r)
            .map(|i| shifted(n, i, false).and_then(|m| self.spaces.get(&m)))
            .collect();
        let active: Vec<usize> = (0..r).filter(|&i| pred[i].is_some()).collect();
        if active.is_empty() {
            return Ok(None);
        }
        let lower = |i: usize| pred[i].unwrap();
        let mut offsets = vec![0; r];
        let mut img_dim = 0;
        for &i in &active {
            offsets[i] = img_dim;
            img_dim += lower(i).dim();
        }
        let cands: Vec<(usize, usize)> = active
            .iter()
            .flat_map(|&j| (0..lower(j).dim()).map(move |c| (j, c)))
            .collect();

        // E_i F_j c = pi^{p(i)p(j)} F_j E_i c + delta_ij [N]_i c
        let image = |j: usize, c: usize| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); img_dim];
            let sj = lower(j);
            for &i in &active {
                let off = offsets[i];
                if let Some(e) = &sj.e[i] {
                    let fj = lower(i).f[j].as_ref().expect("F matrix of predecessor");
                    let y = fj.mul_vec(&e.col(c));
                    let sign = Scalar::pi_pow(datum.p(i) * datum.p(j));
                    for (k, yk) in y.iter().enumerate() {
                        v[off + k] = &v[off + k] + &(&sign * yk);
                    }
                }
                if i == j {
                    let m = shifted(n, i, false).unwrap();
                    let nn = self.pairing(&m, i);
                    v[off + c] = &v[off + c] + &datum.qint(i, nn);
                }
            }
            v
        };
        let images: Vec<Vec<Scalar>> = cands.iter().map(|&(j, c)| image(j, c)).collect();
        let sel = IndependentImages::select(&images, img_dim).ok_or_else(|| {
            QpiError::CheckFailed(format!("specializations disagree on the rank of V at depth {n:?}"))
        })?;
        if sel.is_empty() {
            return Ok(None);
        }
        let d = sel.len();
        let chosen = &sel.chosen;

        let mut f: Vec<Option<Matrix<Scalar>>> = vec![None; r];
        let mut e: Vec<Option<Matrix<Scalar>>> = vec![None; r];
        let mut k = 0;
        for &j in &active {
            let dj = lower(j).dim();
            let cols: Vec<Vec<Scalar>> = (0..dj).map(|c| sel.coords(&images[k + c])).collect();
            k += dj;
            f[j] = Some(Matrix::from_cols(&cols, d));
            let off = offsets[j];
            e[j] = Some(Matrix::from_fn(dj, d, |row, col| images[chosen[col]][off + row].clone()));
        }
        // (F_j c, y) = (c, q_j^{-1} K~_j E_j y)
        let mut gram = Matrix::zeros(d, d);
        for (row, &k) in chosen.iter().enumerate() {
            let (j, c) = cands[k];
            let m = shifted(n, j, false).unwrap();
            let coef = datum.pi_q(j, 0, self.pairing(&m, j) - 1);
            let g = &lower(j).gram;
            let ej = e[j].as_ref().unwrap();
            for col in 0..d {
                gram.set(row, col, &coef * &dot(g.row(c), &ej.col(col)));
            }
        }
        Ok(Some(ModuleSpace {
            depth: n.to_vec(),
            parents: chosen.iter().map(|&k| cands[k]).collect(),
            f,
            e,
            gram,
        }))
    }
}

impl Graded for HighestWeightModule {
    fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    fn top(&self) -> &[i64] {
        &self.lambda
    }

    fn max_height(&self) -> usize {
        match self.truncation {
            Some(t) if !self.is_complete() => t,
            _ => usize::MAX >> 2,
        }
    }

    fn dim(&self, n: &[u32]) -> Result<usize> {
        self.check_height(n)?;
        Ok(self.dim_at(n))
    }

    fn lower(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>> {
        self.check_height(&shifted(n, i, true).unwrap())?;
        Ok(self.f_matrix(i, n))
    }

    fn raise(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>> {
        Ok(self.e_matrix(i, n))
    }

    fn gram(&self, n: &[u32]) -> Result<Matrix<Scalar>> {
        Ok(match self.spaces.get(n) {
            Some(s) => s.gram.clone(),
            None => Matrix::zeros(0, 0),
        })
    }

    fn depths(&self) -> Vec<Depth> {
        self.spaces.keys().cloned().collect()
    }
}
