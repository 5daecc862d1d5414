//! Weight-graded modules generated by the `F_i`, and Kashiwara operators on them.
//!
//! A weight space is addressed by its depth `n`, the weight being `top - sum n_j alpha_j`.
//! The string decomposition `m = sum F_i^(t) m_t` is solved against kernels of the
//! raising operator (`E_i'` on U^-, `E_i` on modules) one depth at a time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cartan::CartanDatum;
use crate::error::{QpiError, Result};
use crate::half::{depths_of_height, height, shifted, HalfAlgebra};
use crate::linalg::{join_vec, scalar_inverse, scalar_nullspace, split_vec, Matrix};
use crate::ratfunc::primitive_vector;
use crate::scalar::Scalar;

pub type Depth = Vec<u32>;

pub trait Graded: Send + Sync {
    fn datum(&self) -> &CartanDatum;
    /// Pairings `<alpha_i^vee, lambda>` of the top weight; zero for U^-.
    fn top(&self) -> &[i64];
    /// Largest height at which weight spaces are available.
    fn max_height(&self) -> usize;
    fn dim(&self, n: &[u32]) -> Result<usize>;
    /// `F_i` from depth `n` to `n + e_i`.
    fn lower(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>>;
    /// String-raising operator from depth `n` to `n - e_i`; zero rows when `n_i = 0`.
    fn raise(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>>;
    /// Polarization on the weight space at `n`.
    fn gram(&self, n: &[u32]) -> Result<Matrix<Scalar>>;
    /// Depths of the weight spaces that are available, possibly zero.
    fn depths(&self) -> Vec<Depth>;

    fn parity(&self, n: &[u32]) -> u8 {
        self.datum().depth_parity(n)
    }

    fn pairing(&self, n: &[u32], i: usize) -> i64 {
        self.datum().pairing_at_depth(self.top(), n, i)
    }

    fn check_height(&self, n: &[u32]) -> Result<()> {
        let h = height(n);
        if h > self.max_height() {
            return Err(QpiError::CutoffExceeded {
                height: h,
                cutoff: self.max_height(),
            });
        }
        Ok(())
    }
}

impl Graded for HalfAlgebra {
    fn datum(&self) -> &CartanDatum {
        HalfAlgebra::datum(self)
    }

    fn top(&self) -> &[i64] {
        &[]
    }

    fn pairing(&self, n: &[u32], i: usize) -> i64 {
        let d = HalfAlgebra::datum(self);
        -(0..d.rank()).map(|j| d.a(i, j) * n[j] as i64).sum::<i64>()
    }

    fn max_height(&self) -> usize {
        self.cutoff()
    }

    fn dim(&self, n: &[u32]) -> Result<usize> {
        HalfAlgebra::dim(self, n)
    }

    fn lower(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>> {
        let up = shifted(n, i, true).unwrap();
        Ok(self.space(&up)?.f[i].clone().expect("F_i into a space with n_i > 0"))
    }

    fn raise(&self, i: usize, n: &[u32]) -> Result<Matrix<Scalar>> {
        let s = self.space(n)?;
        Ok(match &s.e_prime[i] {
            Some(m) => m.clone(),
            None => Matrix::zeros(0, s.dim()),
        })
    }

    fn gram(&self, n: &[u32]) -> Result<Matrix<Scalar>> {
        Ok(self.space(n)?.gram.clone())
    }

    fn depths(&self) -> Vec<Depth> {
        (0..=self.cutoff())
            .flat_map(|h| depths_of_height(self.rank(), h))
            .collect()
    }
}

type Key = (usize, Depth);

/// Columns `F_i^(t) K_t` of the string decomposition at one depth, and the inverse.
struct Strings {
    /// `(t, kernel basis of the raising operator at n - t e_i)`.
    blocks: Vec<(u32, Vec<Vec<Scalar>>)>,
    inv: Matrix<Scalar>,
}

/// Kashiwara operators on a graded module, with cached string data.
pub struct Kashiwara<M> {
    module: Arc<M>,
    lowers: Mutex<HashMap<Key, Arc<Matrix<Scalar>>>>,
    divided: Mutex<HashMap<(usize, Depth, u32), Arc<Matrix<Scalar>>>>,
    strings: Mutex<HashMap<Key, Arc<Strings>>>,
    ops: Mutex<HashMap<(usize, Depth, bool), Arc<Matrix<Scalar>>>>,
}

impl<M: Graded> Kashiwara<M> {
    pub fn new(module: Arc<M>) -> Self {
        Kashiwara {
            module,
            lowers: Mutex::new(HashMap::new()),
            divided: Mutex::new(HashMap::new()),
            strings: Mutex::new(HashMap::new()),
            ops: Mutex::new(HashMap::new()),
        }
    }

    pub fn module(&self) -> &Arc<M> {
        &self.module
    }

    pub fn lower(&self, i: usize, n: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        let key = (i, n.to_vec());
        if let Some(m) = self.lowers.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.module.lower(i, n)?);
        self.lowers.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    /// `F_i^(t)` from depth `m` to `m + t e_i`.
    pub fn divided_power(&self, i: usize, m: &[u32], t: u32) -> Result<Arc<Matrix<Scalar>>> {
        if t == 0 {
            return Ok(Arc::new(Matrix::identity(self.module.dim(m)?)));
        }
        let key = (i, m.to_vec(), t);
        if let Some(x) = self.divided.lock().unwrap().get(&key) {
            return Ok(x.clone());
        }
        let prev = self.divided_power(i, m, t - 1)?;
        let mut mid = m.to_vec();
        mid[i] += t - 1;
        let f = self.lower(i, &mid)?;
        let datum = self.module.datum();
        let c = datum.qint(i, t as i64).inv()?;
        let x = Arc::new(f.mul(&prev).scale(&c));
        self.divided.lock().unwrap().insert(key, x.clone());
        Ok(x)
    }

    fn kernel(&self, i: usize, m: &[u32]) -> Result<Vec<Vec<Scalar>>> {
        let e = self.module.raise(i, m)?;
        if e.rows() == 0 {
            let d = e.cols();
            return Ok((0..d)
                .map(|k| (0..d).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect())
                .collect());
        }
        let k = scalar_nullspace(&e).ok_or_else(|| {
            QpiError::CheckFailed(format!(
                "kernel of the raising operator {} at depth {m:?} differs between specializations",
                i + 1
            ))
        })?;
        Ok(k.iter()
            .map(|v| {
                let [p, n] = split_vec(v);
                join_vec(&primitive_vector(&p), &primitive_vector(&n))
            })
            .collect())
    }

    fn strings(&self, i: usize, n: &[u32]) -> Result<Arc<Strings>> {
        let key = (i, n.to_vec());
        if let Some(s) = self.strings.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let d = self.module.dim(n)?;
        let mut blocks = Vec::new();
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        for t in 0..=n[i] {
            let mut m = n.to_vec();
            m[i] -= t;
            if self.module.dim(&m)? == 0 {
                continue;
            }
            let k = self.kernel(i, &m)?;
            if k.is_empty() {
                continue;
            }
            let f = self.divided_power(i, &m, t)?;
            let imgs: Vec<Vec<Scalar>> = k.iter().map(|v| f.mul_vec(v)).collect();
            let zero = imgs.iter().filter(|v| v.iter().all(|x| x.is_zero())).count();
            if zero == imgs.len() {
                continue;
            }
            if zero > 0 {
                return Err(QpiError::CheckFailed(format!(
                    "F_{}^({t}) is neither injective nor zero on highest vectors at depth {m:?}",
                    i + 1
                )));
            }
            cols.extend(imgs);
            blocks.push((t, k));
        }
        if cols.len() != d {
            return Err(QpiError::CheckFailed(format!(
                "string decomposition for i = {} at depth {n:?} has {} vectors for dimension {d}",
                i + 1,
                cols.len()
            )));
        }
        let s = Matrix::from_cols(&cols, d);
        let inv = scalar_inverse(&s).ok_or_else(|| {
            QpiError::CheckFailed(format!("i-strings at depth {n:?} are not independent"))
        })?;
        let s = Arc::new(Strings { blocks, inv });
        self.strings.lock().unwrap().insert(key, s.clone());
        Ok(s)
    }

    /// The components `(t, m_t)` of `v = sum F_i^(t) m_t`, `m_t` at depth `n - t e_i`.
    pub fn decompose(&self, i: usize, n: &[u32], v: &[Scalar]) -> Result<Vec<(u32, Vec<Scalar>)>> {
        let s = self.strings(i, n)?;
        let c = s.inv.mul_vec(v);
        let mut out = Vec::new();
        let mut off = 0;
        for (t, k) in &s.blocks {
            let mut m = n.to_vec();
            m[i] -= t;
            let dm = self.module.dim(&m)?;
            let mut u = vec![Scalar::zero(); dm];
            for (j, kv) in k.iter().enumerate() {
                for (a, b) in u.iter_mut().zip(kv) {
                    *a = &*a + &(&c[off + j] * b);
                }
            }
            off += k.len();
            if u.iter().any(|x| !x.is_zero()) {
                out.push((*t, u));
            }
        }
        Ok(out)
    }

    fn operator(&self, i: usize, n: &[u32], up: bool) -> Result<Arc<Matrix<Scalar>>> {
        let key = (i, n.to_vec(), up);
        if let Some(m) = self.ops.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let target = if up {
            shifted(n, i, true)
        } else {
            shifted(n, i, false)
        };
        let d = self.module.dim(n)?;
        let m = match target {
            None => Matrix::zeros(0, d),
            Some(tgt) => {
                self.module.check_height(&tgt)?;
                let dt = self.module.dim(&tgt)?;
                let s = self.strings(i, n)?;
                let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(d);
                for (t, k) in &s.blocks {
                    let mut m = n.to_vec();
                    m[i] -= t;
                    if !up && *t == 0 {
                        cols.extend(k.iter().map(|_| vec![Scalar::zero(); dt]));
                        continue;
                    }
                    let tt = if up { t + 1 } else { t - 1 };
                    let f = self.divided_power(i, &m, tt)?;
                    cols.extend(k.iter().map(|v| f.mul_vec(v)));
                }
                Matrix::from_cols(&cols, dt).mul(&s.inv)
            }
        };
        let m = Arc::new(m);
        self.ops.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    /// Matrix of `f~_i` from depth `n` to `n + e_i`.
    pub fn f_tilde(&self, i: usize, n: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        self.operator(i, n, true)
    }

    /// Matrix of `e~_i` from depth `n` to `n - e_i`.
    pub fn e_tilde(&self, i: usize, n: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        self.operator(i, n, false)
    }

    pub fn apply_f(&self, i: usize, n: &[u32], v: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.f_tilde(i, n)?.mul_vec(v))
    }

    pub fn apply_e(&self, i: usize, n: &[u32], v: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.e_tilde(i, n)?.mul_vec(v))
    }

    /// `f~_{w_0} ... f~_{w_k}` applied to `v` at depth `n`, rightmost letter first.
    pub fn apply_f_word(&self, word: &[usize], n: &[u32], v: &[Scalar]) -> Result<(Depth, Vec<Scalar>)> {
        let mut depth = n.to_vec();
        let mut v = v.to_vec();
        for &i in word.iter().rev() {
            v = self.apply_f(i, &depth, &v)?;
            depth[i] += 1;
        }
        Ok((depth, v))
    }
}
