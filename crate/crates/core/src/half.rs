//! The half algebra U^-: words in the F_i modulo the radical of the polarization.
//!
//! Each weight space is built from the ones below it. A vector of nonzero weight
//! is determined by its images under all E_i', so a word is recorded through the
//! stacked vector of those images, and the lexicographically earliest independent
//! words become the basis.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, RootVec};
use crate::error::{QpiError, Result};
use crate::linalg::{dot, scalar_inverse, IndependentImages, Matrix};
use crate::scalar::Scalar;

pub type Word = Vec<usize>;

/// A finite combination of words, all at the same depth.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfElement {
    pub depth: Vec<u32>,
    pub terms: BTreeMap<Word, Scalar>,
}

pub fn word_depth(rank: usize, w: &[usize]) -> Vec<u32> {
    let mut n = vec![0u32; rank];
    for &i in w {
        n[i] += 1;
    }
    n
}

pub fn height(n: &[u32]) -> usize {
    n.iter().map(|&x| x as usize).sum()
}

pub fn shifted(n: &[u32], i: usize, up: bool) -> Option<Vec<u32>> {
    let mut m = n.to_vec();
    if up {
        m[i] += 1;
    } else {
        m[i] = m[i].checked_sub(1)?;
    }
    Some(m)
}

/// All depth vectors of total height `h`, in lexicographic order.
pub fn depths_of_height(rank: usize, h: usize) -> Vec<Vec<u32>> {
    fn rec(rank: usize, h: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == rank {
            cur.push(h as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=h {
            cur.push(k as u32);
            rec(rank, h - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if rank == 0 {
        return out;
    }
    rec(rank, h, &mut Vec::new(), &mut out);
    out
}

impl HalfElement {
    pub fn zero(depth: Vec<u32>) -> Self {
        HalfElement {
            depth,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::word(rank, Vec::new())
    }

    pub fn word(rank: usize, w: Word) -> Self {
        Self::monomial(rank, w, Scalar::one())
    }

    pub fn monomial(rank: usize, w: Word, c: Scalar) -> Self {
        let depth = word_depth(rank, &w);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        HalfElement { depth, terms }
    }

    pub fn weight(&self) -> RootVec {
        RootVec::from_depth(&self.depth)
    }

    pub fn parity(&self, datum: &CartanDatum) -> u8 {
        datum.depth_parity(&self.depth)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(Scalar::zero);
        *e = &*e + c;
        let dead: Vec<Word> = self
            .terms
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in dead {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, o: &HalfElement) -> HalfElement {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.depth, o.depth, "adding elements of different weight");
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> HalfElement {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c * s))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        HalfElement {
            depth: self.depth.clone(),
            terms,
        }
    }

    pub fn sub(&self, o: &HalfElement) -> HalfElement {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    /// Concatenation product.
    pub fn mul(&self, o: &HalfElement) -> HalfElement {
        let depth: Vec<u32> = self.depth.iter().zip(&o.depth).map(|(a, b)| a + b).collect();
        let mut out = HalfElement::zero(depth);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend(w2);
                out.add_term(w, &(c1 * c2));
            }
        }
        out
    }

    /// The anti-involution fixing every F_i: reverse each word.
    pub fn rho(&self) -> HalfElement {
        let mut out = HalfElement::zero(self.depth.clone());
        for (w, c) in &self.terms {
            let mut r = w.clone();
            r.reverse();
            out.add_term(r, c);
        }
        out
    }

    /// Coefficientwise bar involution; words are fixed.
    pub fn bar(&self) -> HalfElement {
        HalfElement {
            depth: self.depth.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.bar())).collect(),
        }
    }

    /// `E_i'` (`sign = -1`) or `E_i''` (`sign = +1`) on free words.
    fn derivation(&self, datum: &CartanDatum, i: usize, sign: i64) -> HalfElement {
        let Some(depth) = shifted(&self.depth, i, false) else {
            return HalfElement::zero(self.depth.clone());
        };
        let mut out = HalfElement::zero(depth);
        for (w, c) in &self.terms {
            let mut pe = 0i64;
            let mut qe = 0i64;
            for (m, &j) in w.iter().enumerate() {
                if j == i {
                    let mut r = w.clone();
                    r.remove(m);
                    out.add_term(r, &(c * &datum.pi_q(i, pe, qe)));
                }
                pe += datum.p(j);
                qe += sign * datum.a(i, j);
            }
        }
        out
    }

    pub fn e_prime(&self, datum: &CartanDatum, i: usize) -> HalfElement {
        self.derivation(datum, i, -1)
    }

    pub fn e_dprime(&self, datum: &CartanDatum, i: usize) -> HalfElement {
        self.derivation(datum, i, 1)
    }

    /// Left multiplication by `F_i`.
    pub fn left_f(&self, i: usize) -> HalfElement {
        let rank = self.depth.len();
        HalfElement::word(rank, vec![i]).mul(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(w, c)| TermJson {
                word: w.iter().map(|&i| i + 1).collect(),
                plus: c.plus.to_string(),
                minus: c.minus.to_string(),
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }

    pub fn from_json(rank: usize, v: &serde_json::Value) -> Result<Self> {
        let terms: Vec<TermJson> = serde_json::from_value(v["terms"].clone())
            .map_err(|e| QpiError::Parse(e.to_string()))?;
        let mut out: Option<HalfElement> = None;
        for t in terms {
            let w: Word = t.word.iter().map(|&i| i - 1).collect();
            let plus: Scalar = t.plus.parse()?;
            let minus: Scalar = t.minus.parse()?;
            let c = Scalar::new(plus.plus, minus.plus);
            let m = HalfElement::monomial(rank, w, c);
            out = Some(match out {
                None => m,
                Some(acc) => acc.add(&m),
            });
        }
        Ok(out.unwrap_or_else(|| HalfElement::one(rank).scale(&Scalar::zero())))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    word: Vec<usize>,
    plus: String,
    minus: String,
}

/// One weight space of U^-.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightSpace {
    pub depth: Vec<u32>,
    /// Basis words, in lexicographic order.
    pub chosen_words: Vec<Word>,
    /// `f[j]`: left multiplication by `F_j` from depth `n - e_j` into this space.
    pub f: Vec<Option<Matrix<Scalar>>>,
    /// `e_prime[i]`: `E_i'` from this space to depth `n - e_i`.
    pub e_prime: Vec<Option<Matrix<Scalar>>>,
    pub e_dprime: Vec<Option<Matrix<Scalar>>>,
    /// Polarization on `chosen_words`.
    pub gram: Matrix<Scalar>,
}

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.chosen_words.len()
    }
}

#[derive(Serialize, Deserialize)]
struct StoredSpaces {
    datum: CartanDatum,
    spaces: Vec<WeightSpace>,
}

/// Lazily built weight spaces of U^- up to a height cutoff.
pub struct HalfAlgebra {
    datum: CartanDatum,
    cutoff: usize,
    spaces: RwLock<BTreeMap<Vec<u32>, Arc<WeightSpace>>>,
}

impl HalfAlgebra {
    pub fn new(datum: CartanDatum, cutoff: usize) -> Self {
        HalfAlgebra {
            datum,
            cutoff,
            spaces: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn cached(&self, n: &[u32]) -> Option<Arc<WeightSpace>> {
        self.spaces.read().unwrap().get(n).cloned()
    }

    /// The weight space at depth `n`, building predecessors as needed.
    pub fn space(&self, n: &[u32]) -> Result<Arc<WeightSpace>> {
        if let Some(s) = self.cached(n) {
            return Ok(s);
        }
        let h = height(n);
        if h > self.cutoff {
            return Err(QpiError::CutoffExceeded {
                height: h,
                cutoff: self.cutoff,
            });
        }
        for i in 0..self.rank() {
            if let Some(m) = shifted(n, i, false) {
                self.space(&m)?;
            }
        }
        let s = Arc::new(self.build(n)?);
        let mut w = self.spaces.write().unwrap();
        Ok(w.entry(n.to_vec()).or_insert(s).clone())
    }

    /// Build every weight space of height at most `h`, level by level in parallel.
    pub fn prefetch(&self, h: usize) -> Result<()> {
        for level in 0..=h.min(self.cutoff) {
            let todo: Vec<Vec<u32>> = depths_of_height(self.rank(), level)
                .into_iter()
                .filter(|n| self.cached(n).is_none())
                .collect();
            let built: Vec<Result<(Vec<u32>, WeightSpace)>> = todo
                .into_par_iter()
                .map(|n| self.build(&n).map(|s| (n, s)))
                .collect();
            let mut w = self.spaces.write().unwrap();
            for b in built {
                let (n, s) = b?;
                w.entry(n).or_insert(Arc::new(s));
            }
        }
        Ok(())
    }

    pub fn dim(&self, n: &[u32]) -> Result<usize> {
        Ok(self.space(n)?.dim())
    }

    fn cache_file(&self, dir: &Path) -> PathBuf {
        let key = serde_json::to_string(&self.datum).unwrap_or_default();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in key.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        let name: String = self
            .datum
            .name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        dir.join(format!("u-minus-{name}-{h:016x}.json"))
    }

    /// Write every built weight space to `dir`.
    pub fn save_cache(&self, dir: &Path) -> Result<()> {
        let stored = StoredSpaces {
            datum: self.datum.clone(),
            spaces: self
                .spaces
                .read()
                .unwrap()
                .values()
                .map(|s| (**s).clone())
                .collect(),
        };
        std::fs::create_dir_all(dir).map_err(|e| QpiError::Cache(e.to_string()))?;
        let text = serde_json::to_string(&stored).map_err(|e| QpiError::Cache(e.to_string()))?;
        std::fs::write(self.cache_file(dir), text).map_err(|e| QpiError::Cache(e.to_string()))
    }

    /// Load weight spaces previously saved for the same datum. Returns how many were loaded.
    pub fn load_cache(&self, dir: &Path) -> Result<usize> {
        let path = self.cache_file(dir);
        if !path.exists() {
            return Ok(0);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| QpiError::Cache(e.to_string()))?;
        let stored: StoredSpaces =
            serde_json::from_str(&text).map_err(|e| QpiError::Cache(e.to_string()))?;
        if stored.datum != self.datum {
            return Err(QpiError::Cache(format!("{} belongs to another datum", path.display())));
        }
        let mut w = self.spaces.write().unwrap();
        let mut count = 0;
        for s in stored.spaces {
            if height(&s.depth) <= self.cutoff {
                w.entry(s.depth.clone()).or_insert_with(|| Arc::new(s));
                count += 1;
            }
        }
        Ok(count)
    }

    fn build(&self, n: &[u32]) -> Result<WeightSpace> {
        let r = self.rank();
        let datum = &self.datum;
        if n.iter().all(|&x| x == 0) {
            return Ok(WeightSpace {
                depth: n.to_vec(),
                chosen_words: vec![Vec::new()],
                f: vec![None; r],
                e_prime: vec![None; r],
                e_dprime: vec![None; r],
                gram: Matrix::identity(1),
            });
        }
        let pred: Vec<Option<Arc<WeightSpace>>> = (0..r)
            .map(|i| shifted(n, i, false).map(|m| self.cached(&m).expect("predecessor built")))
            .collect();
        // pred2[i][j]: space at n - e_i - e_j
        let lower = |i: usize| pred[i].as_ref().unwrap();
        let active: Vec<usize> = (0..r).filter(|&i| n[i] > 0).collect();
        let offsets: Vec<usize> = {
            let mut acc = 0;
            let mut v = vec![0; r];
            for &i in &active {
                v[i] = acc;
                acc += lower(i).dim();
            }
            v.push(acc);
            v
        };
        let img_dim = active.iter().map(|&i| lower(i).dim()).sum::<usize>();

        // candidates j . c with c a basis word of n - e_j
        let mut cands: Vec<(Word, usize, usize)> = Vec::new();
        for &j in &active {
            for (c, w) in lower(j).chosen_words.iter().enumerate() {
                let mut word = vec![j];
                word.extend(w);
                cands.push((word, j, c));
            }
        }
        cands.sort();

        let image = |j: usize, c: usize, sign: i64| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); img_dim];
            let sj = lower(j);
            for &i in &active {
                let off = offsets[i];
                let ops = if sign < 0 { &sj.e_prime[i] } else { &sj.e_dprime[i] };
                if let Some(e) = ops {
                    // F_j from n - e_i - e_j to n - e_i
                    let fj = lower(i).f[j].as_ref().expect("F matrix of predecessor");
                    let col = e.col(c);
                    let y = fj.mul_vec(&col);
                    let coef = datum.pi_q(i, datum.p(j), sign * datum.a(i, j));
                    for (k, yk) in y.iter().enumerate() {
                        v[off + k] = &v[off + k] + &(&coef * yk);
                    }
                }
                if i == j {
                    v[off + c] = &v[off + c] + &Scalar::one();
                }
            }
            v
        };

        let images: Vec<Vec<Scalar>> = cands.iter().map(|(_, j, c)| image(*j, *c, -1)).collect();
        let sel = IndependentImages::select(&images, img_dim).ok_or_else(|| {
            QpiError::CheckFailed(format!("specializations disagree on the rank of U^- at depth {n:?}"))
        })?;
        let chosen = sel.chosen.clone();
        let d = chosen.len();
        let coords_of = |v: &[Scalar]| sel.coords(v);

        let mut f: Vec<Option<Matrix<Scalar>>> = vec![None; r];
        let index: HashMap<(usize, usize), usize> =
            cands.iter().enumerate().map(|(k, (_, j, c))| ((*j, *c), k)).collect();
        for &j in &active {
            let dj = lower(j).dim();
            let cols: Vec<Vec<Scalar>> = (0..dj)
                .map(|c| coords_of(&images[index[&(j, c)]]))
                .collect();
            f[j] = Some(Matrix::from_cols(&cols, d));
        }
        let mut e_prime: Vec<Option<Matrix<Scalar>>> = vec![None; r];
        let mut e_dprime: Vec<Option<Matrix<Scalar>>> = vec![None; r];
        let dimages: Vec<Vec<Scalar>> = chosen
            .iter()
            .map(|&k| image(cands[k].1, cands[k].2, 1))
            .collect();
        for &i in &active {
            let di = lower(i).dim();
            let off = offsets[i];
            e_prime[i] = Some(Matrix::from_fn(di, d, |row, col| images[chosen[col]][off + row].clone()));
            e_dprime[i] = Some(Matrix::from_fn(di, d, |row, col| dimages[col][off + row].clone()));
        }
        // (F_j c, y) = (c, E_j' y)
        let mut gram = Matrix::zeros(d, d);
        for (row, &k) in chosen.iter().enumerate() {
            let (_, j, c) = &cands[k];
            let g = &lower(*j).gram;
            let ej = e_prime[*j].as_ref().unwrap();
            for col in 0..d {
                gram.set(row, col, dot(g.row(*c), &ej.col(col)));
            }
        }
        Ok(WeightSpace {
            depth: n.to_vec(),
            chosen_words: chosen.iter().map(|&k| cands[k].0.clone()).collect(),
            f,
            e_prime,
            e_dprime,
            gram,
        })
    }

    /// Coordinates of a single word in the basis of its weight space.
    pub fn word_coords(&self, w: &[usize]) -> Result<Vec<Scalar>> {
        let mut depth = vec![0u32; self.rank()];
        let mut v = vec![Scalar::one()];
        for &l in w.iter().rev() {
            depth[l] += 1;
            let s = self.space(&depth)?;
            v = s.f[l].as_ref().unwrap().mul_vec(&v);
        }
        Ok(v)
    }

    pub fn coords(&self, y: &HalfElement) -> Result<Vec<Scalar>> {
        let d = self.dim(&y.depth)?;
        let mut acc = vec![Scalar::zero(); d];
        for (w, c) in &y.terms {
            let v = self.word_coords(w)?;
            for (a, b) in acc.iter_mut().zip(&v) {
                *a = &*a + &(c * b);
            }
        }
        Ok(acc)
    }

    /// The element with the given coordinates at depth `n`.
    pub fn element(&self, n: &[u32], coords: &[Scalar]) -> Result<HalfElement> {
        let s = self.space(n)?;
        let mut out = HalfElement::zero(n.to_vec());
        for (w, c) in s.chosen_words.iter().zip(coords) {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    /// Rewrite in the basis words of its weight space.
    pub fn reduce(&self, y: &HalfElement) -> Result<HalfElement> {
        self.element(&y.depth, &self.coords(y)?)
    }

    pub fn is_zero_in_quotient(&self, y: &HalfElement) -> Result<bool> {
        Ok(self.coords(y)?.iter().all(|x| x.is_zero()))
    }

    pub fn polarization(&self, y: &HalfElement, z: &HalfElement) -> Result<Scalar> {
        if y.depth != z.depth {
            return Ok(Scalar::zero());
        }
        let g = &self.space(&y.depth)?.gram;
        let cy = self.coords(y)?;
        let cz = self.coords(z)?;
        Ok(dot(&cy, &g.mul_vec(&cz)))
    }

    /// Gram matrix of all words of weight `n`, through the reduction.
    pub fn word_gram(&self, words: &[Word]) -> Result<Matrix<Scalar>> {
        let Some(w0) = words.first() else {
            return Ok(Matrix::zeros(0, 0));
        };
        let n = word_depth(self.rank(), w0);
        let g = self.space(&n)?.gram.clone();
        let cols: Vec<Vec<Scalar>> = words.iter().map(|w| self.word_coords(w)).collect::<Result<_>>()?;
        let r = Matrix::from_cols(&cols, g.rows());
        Ok(r.transpose().mul(&g).mul(&r))
    }

    pub fn e_prime(&self, i: usize, y: &HalfElement) -> Result<HalfElement> {
        let Some(m) = shifted(&y.depth, i, false) else {
            return Ok(HalfElement::zero(y.depth.clone()));
        };
        let s = self.space(&y.depth)?;
        let c = s.e_prime[i].as_ref().unwrap().mul_vec(&self.coords(y)?);
        self.element(&m, &c)
    }

    /// `F_i^{(a)}` as a single-word element.
    pub fn divided_power(&self, i: usize, a: u32) -> HalfElement {
        let c = self.datum.qfact(i, a).inv().expect("factorial is invertible");
        HalfElement::monomial(self.rank(), vec![i; a as usize], c)
    }

    /// Product of divided powers, left to right.
    pub fn divided_power_monomial(&self, mono: &[(usize, u32)]) -> HalfElement {
        let mut acc = HalfElement::one(self.rank());
        for &(i, a) in mono {
            acc = acc.mul(&self.divided_power(i, a));
        }
        acc
    }

    /// The Serre element `S'_ij`.
    pub fn serre_element(&self, i: usize, j: usize) -> HalfElement {
        let datum = &self.datum;
        let b = 1 - datum.a(i, j);
        let mut out = HalfElement::zero(Vec::new());
        for t in 0..=b {
            let sign = if t % 2 == 0 { 1 } else { -1 };
            let c = &(&datum.pi_q(i, t * (t - 1) / 2 + t * datum.p(j), 0)
                * &datum.qbinom(i, b, t as u32))
                * &Scalar::from_int(sign);
            let mut w = vec![i; (b - t) as usize];
            w.push(j);
            w.extend(vec![i; t as usize]);
            out = out.add(&HalfElement::monomial(self.rank(), w, c));
        }
        out
    }

    /// The series `P = sum (-1)^n q_i^{-C(n,2)} F_i^{(n)} E_i'^n`.
    pub fn boson_projector_series(&self, i: usize, u: &HalfElement) -> HalfElement {
        let datum = &self.datum;
        let mut out = HalfElement::zero(u.depth.clone());
        let mut en = u.clone();
        let mut k = 0i64;
        while !en.is_zero() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = &datum.pi_q(i, 0, -(k * (k - 1) / 2)) * &Scalar::from_int(sign);
            out = out.add(&self.divided_power(i, k as u32).mul(&en).scale(&c));
            en = en.e_prime(datum, i);
            k += 1;
        }
        out
    }
}

/// Polarization of two elements by the recursion on free words:
/// `(F_i y, z) = (y, E_i' z)` and `(1, 1) = 1`.
pub fn polarization_words(datum: &CartanDatum, y: &HalfElement, z: &HalfElement) -> Scalar {
    let mut memo: HashMap<(Word, Word), Scalar> = HashMap::new();
    fn pair(datum: &CartanDatum, a: &[usize], b: &[usize], memo: &mut HashMap<(Word, Word), Scalar>) -> Scalar {
        if a.is_empty() {
            return if b.is_empty() { Scalar::one() } else { Scalar::zero() };
        }
        let key = (a.to_vec(), b.to_vec());
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let i = a[0];
        let eb = HalfElement::word(datum.rank(), b.to_vec()).e_prime(datum, i);
        let mut acc = Scalar::zero();
        for (w, c) in &eb.terms {
            acc = &acc + &(c * &pair(datum, &a[1..], w, memo));
        }
        memo.insert(key, acc.clone());
        acc
    }
    if y.depth != z.depth {
        return Scalar::zero();
    }
    let mut acc = Scalar::zero();
    for (wa, ca) in &y.terms {
        for (wb, cb) in &z.terms {
            acc = &acc + &(&(ca * cb) * &pair(datum, wa, wb, &mut memo));
        }
    }
    acc
}

/// Every word of depth `n`, in lexicographic order.
pub fn all_words(n: &[u32]) -> Vec<Word> {
    fn rec(n: &mut Vec<u32>, cur: &mut Word, out: &mut Vec<Word>) {
        if n.iter().all(|&x| x == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..n.len() {
            if n[i] > 0 {
                n[i] -= 1;
                cur.push(i);
                rec(n, cur, out);
                cur.pop();
                n[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut n.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Inverse of a Scalar Gram matrix, or an error naming the depth.
pub fn gram_inverse(s: &WeightSpace) -> Result<Matrix<Scalar>> {
    scalar_inverse(&s.gram).ok_or_else(|| {
        QpiError::CheckFailed(format!("degenerate polarization at depth {:?}", s.depth))
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn depths_enumeration() {
        assert_eq!(depths_of_height(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(all_words(&[1, 1]), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn e_prime_on_words() {
        let d = CartanDatum::builtin("osp14").unwrap();
        let f1 = HalfElement::word(2, vec![0]);
        assert_eq!(f1.e_prime(&d, 0), HalfElement::one(2));
        let f11 = HalfElement::word(2, vec![0, 0]);
        let expect = HalfElement::monomial(2, vec![0], s("1 + pi*q^(-2)"));
        assert_eq!(f11.e_prime(&d, 0), expect);
        let expect = HalfElement::monomial(2, vec![0], s("1 + pi*q^2"));
        assert_eq!(f11.e_dprime(&d, 0), expect);
        assert!(HalfElement::word(2, vec![1]).e_prime(&d, 0).is_zero());
    }

    #[test]
    fn small_weight_spaces() {
        let d = CartanDatum::builtin("osp14").unwrap();
        let u = HalfAlgebra::new(d, 6);
        let s1 = u.space(&[1, 0]).unwrap();
        assert_eq!(s1.chosen_words, vec![vec![0]]);
        assert!(s1.gram.get(0, 0).is_one());
        let s11 = u.space(&[1, 1]).unwrap();
        assert_eq!(s11.chosen_words, vec![vec![0, 1], vec![1, 0]]);
        let osp12 = HalfAlgebra::new(CartanDatum::builtin("osp12").unwrap(), 4);
        let s2 = osp12.space(&[2]).unwrap();
        assert_eq!(s2.gram.get(0, 0), &s("1 + pi*q^(-2)"));
    }

    #[test]
    fn gram_matches_word_recursion() {
        let d = CartanDatum::builtin("osp14").unwrap();
        let u = HalfAlgebra::new(d.clone(), 5);
        for n in [[2u32, 1], [3, 1], [2, 2], [1, 2]] {
            let words = all_words(&n);
            let g = u.word_gram(&words).unwrap();
            for (a, wa) in words.iter().enumerate() {
                for (b, wb) in words.iter().enumerate() {
                    let direct = polarization_words(
                        &d,
                        &HalfElement::word(2, wa.clone()),
                        &HalfElement::word(2, wb.clone()),
                    );
                    assert_eq!(g.get(a, b), &direct, "{wa:?} {wb:?}");
                }
            }
        }
    }
}
