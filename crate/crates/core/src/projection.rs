//! The projection `u -> u v+` from U^- onto V(lambda), and what it carries.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::crystal::{Crystal, Residue};
use crate::error::Result;
use crate::graded::{Depth, Graded};
use crate::half::{height, shifted, HalfAlgebra};
use crate::linalg::Matrix;
use crate::module::HighestWeightModule;
use crate::scalar::Scalar;

pub struct Projection {
    u: Arc<HalfAlgebra>,
    v: Arc<HighestWeightModule>,
    cache: Mutex<HashMap<Depth, Arc<Matrix<Scalar>>>>,
    forms: Mutex<HashMap<Depth, Arc<Matrix<Scalar>>>>,
}

impl Projection {
    pub fn new(u: Arc<HalfAlgebra>, v: Arc<HighestWeightModule>) -> Self {
        Projection {
            u,
            v,
            cache: Mutex::new(HashMap::new()),
            forms: Mutex::new(HashMap::new()),
        }
    }

    pub fn half(&self) -> &Arc<HalfAlgebra> {
        &self.u
    }

    pub fn module(&self) -> &Arc<HighestWeightModule> {
        &self.v
    }

    /// Matrix from the chosen-word basis of U^- at `n` to the basis of V(lambda).
    pub fn matrix(&self, n: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        if let Some(m) = self.cache.lock().unwrap().get(n) {
            return Ok(m.clone());
        }
        let su = self.u.space(n)?;
        let d = self.v.dim_at(n);
        let m = if height(n) == 0 {
            Matrix::identity(1)
        } else {
            let mut cols = Vec::with_capacity(su.dim());
            for w in &su.chosen_words {
                let j = w[0];
                let below = shifted(n, j, false).unwrap();
                let p = self.matrix(&below)?;
                let rest = self.u.word_coords(&w[1..])?;
                cols.push(self.v.f_matrix(j, &below).mul_vec(&p.mul_vec(&rest)));
            }
            Matrix::from_cols(&cols, d)
        };
        let m = Arc::new(m);
        self.cache.lock().unwrap().insert(n.to_vec(), m.clone());
        Ok(m)
    }

    pub fn apply(&self, n: &[u32], coords: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.matrix(n)?.mul_vec(coords))
    }

    /// `E_i` on `y v+` against `[E_i, y] v+` from `E_i'` and `E_i''`.
    pub fn check_e_action(&self, n: &[u32], i: usize) -> Result<bool> {
        let Some(below) = shifted(n, i, false) else {
            return Ok(true);
        };
        let datum = self.u.datum();
        let su = self.u.space(n)?;
        let p = self.matrix(n)?;
        let lhs = self.v.e_matrix(i, n).mul(&p);
        let nn = self.v.pairing(&below, i);
        let e1 = su.e_prime[i].as_ref().unwrap();
        let e2 = su.e_dprime[i].as_ref().unwrap();
        let inner = e2
            .scale(&datum.pi_q(i, nn, nn))
            .sub(&e1.scale(&datum.pi_q(i, 0, -nn)))
            .scale(&datum.qdiff(i).inv()?);
        let rhs = self.matrix(&below)?.mul(&inner);
        Ok(lhs == rhs)
    }

    /// The form `(x v+, y v+)` on U^- at `n`, by the two-term recursion through `E_i'` and `E_i''`.
    pub fn form_by_recursion(&self, n: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        if let Some(m) = self.forms.lock().unwrap().get(n) {
            return Ok(m.clone());
        }
        let datum = self.u.datum();
        let su = self.u.space(n)?;
        let d = su.dim();
        let m = if height(n) == 0 {
            Matrix::identity(1)
        } else {
            let mut g = Matrix::zeros(d, d);
            for (row, w) in su.chosen_words.iter().enumerate() {
                let i = w[0];
                let below = shifted(n, i, false).unwrap();
                let gb = self.form_by_recursion(&below)?;
                let x = self.u.word_coords(&w[1..])?;
                let nn = self.v.pairing(&below, i);
                // [pi_i^N q_i^{2N} E_i'' - E_i'] / (pi_i q_i^2 - 1)
                let denom = (&datum.pi_q(i, 1, 2) - &Scalar::one()).inv()?;
                let op = su.e_dprime[i]
                    .as_ref()
                    .unwrap()
                    .scale(&datum.pi_q(i, nn, 2 * nn))
                    .sub(su.e_prime[i].as_ref().unwrap())
                    .scale(&denom);
                let xr: Vec<Scalar> = gb.transpose().mul_vec(&x);
                let r = op.transpose().mul_vec(&xr);
                for (col, val) in r.into_iter().enumerate() {
                    g.set(row, col, val);
                }
            }
            g
        };
        let m = Arc::new(m);
        self.forms.lock().unwrap().insert(n.to_vec(), m.clone());
        Ok(m)
    }

    /// The module form pulled back along the projection.
    pub fn pulled_back_form(&self, n: &[u32]) -> Result<Matrix<Scalar>> {
        let p = self.matrix(n)?;
        let g = self.v.gram(n)?;
        if g.rows() == 0 {
            let d = p.cols();
            return Ok(Matrix::zeros(d, d));
        }
        Ok(p.transpose().mul(&g).mul(&p))
    }

    /// Residue of the image of a B(infinity) node in B(lambda): a node, zero, or a failure.
    pub fn project_node(
        &self,
        binf: &Crystal<HalfAlgebra>,
        bla: &Crystal<HighestWeightModule>,
        b: usize,
    ) -> Result<Residue> {
        let n = binf.nodes[b].depth.clone();
        let x = self.apply(&n, &binf.lift(b))?;
        if x.is_empty() {
            return Ok(Residue::Zero);
        }
        Ok(bla.residue(&n, &x))
    }
}
