//! Dense exact linear algebra, generic over the coefficient ring.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

pub trait Ring: Clone + PartialEq + Debug + Send + Sync + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

impl<T> Ring for T
where
    T: Clone + PartialEq + Debug + Send + Sync + Zero + One,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
    for<'a> &'a T: Neg<Output = T>,
{
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

pub trait Field: Ring {
    fn div_ref(&self, o: &Self) -> Self;
    /// Heuristic size used to choose pivots.
    fn weight(&self) -> usize {
        0
    }
}

impl Field for num_rational::BigRational {
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for RatFunc {
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn weight(&self) -> usize {
        self.numer().coeffs().len() + self.denom().coeffs().len()
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn from_cols(cols: &[Vec<T>], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * o.cols + c;
                    out.data[idx] = out.data[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect()
    }

    pub fn add(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_ref(b)).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|a| a.mul_ref(s))
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Matrix<T>) -> Matrix<T> {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |r, c| {
            self.get(r / o.rows, c / o.cols).mul_ref(o.get(r % o.rows, c % o.cols))
        })
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix<T> {
        Self::from_fn(self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix<T> {
        Self::from_fn(idx.len(), self.cols, |r, c| self.get(idx[r], c).clone())
    }

    /// Stack blocks vertically; all blocks share a column count.
    pub fn vstack(blocks: &[&Matrix<T>], cols: usize) -> Matrix<T> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    /// Place `block` with its top-left corner at `(r0, c0)`.
    pub fn write_block(&mut self, r0: usize, c0: usize, block: &Matrix<T>) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix<T> {
        Self::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

pub fn dot<T: Ring>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.add_ref(&x.mul_ref(y));
    }
    acc
}

pub fn axpy<T: Ring>(acc: &mut [T], s: &T, v: &[T]) {
    if s.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a = a.add_ref(&s.mul_ref(b));
        }
    }
}

/// Row echelon form of `m`; returns the reduced matrix and pivot columns.
pub fn rref<T: Field>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows)
            .filter(|&i| !a.get(i, c).is_zero())
            .min_by_key(|&i| a.get(i, c).weight())
        else {
            continue;
        };
        if p != r {
            for k in 0..a.cols {
                a.data.swap(p * a.cols + k, r * a.cols + k);
            }
        }
        let inv = T::one().div_ref(a.get(r, c));
        for k in c..a.cols {
            let v = a.get(r, k).mul_ref(&inv);
            a.set(r, k, v);
        }
        for i in 0..a.rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for k in c..a.cols {
                let rk = a.get(r, k);
                if rk.is_zero() {
                    continue;
                }
                let v = a.get(i, k).sub_ref(&f.mul_ref(rk));
                a.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<T: Field>(m: &Matrix<T>) -> usize {
    rref(m).1.len()
}

/// Basis of the right null space, as columns.
pub fn nullspace<T: Field>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let (a, pivots) = rref(m);
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![T::zero(); m.cols];
        v[free] = T::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = a.get(r, free).neg_ref();
        }
        out.push(v);
    }
    out
}

pub fn inverse<T: Field>(m: &Matrix<T>) -> Option<Matrix<T>> {
    assert_eq!(m.rows, m.cols, "inverse of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return Some(Matrix::zeros(0, 0));
    }
    let mut aug = Matrix::zeros(n, 2 * n);
    aug.write_block(0, 0, m);
    aug.write_block(0, n, &Matrix::identity(n));
    let (a, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(a.block(0, n, n, n))
}

/// Some solution of `m x = b`, if one exists.
pub fn solve<T: Field>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let mut aug = Matrix::zeros(m.rows, m.cols + 1);
    aug.write_block(0, 0, m);
    for (r, v) in b.iter().enumerate() {
        aug.set(r, m.cols, v.clone());
    }
    let (a, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![T::zero(); m.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = a.get(r, m.cols).clone();
    }
    Some(x)
}

/// Incrementally maintained echelon basis of a growing set of vectors.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    dim: usize,
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Field> EchelonBasis<T> {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduce `v` against the current rows.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            axpy(&mut w, &f.neg_ref(), row);
        }
        w
    }

    pub fn is_independent(&self, v: &[T]) -> bool {
        self.reduce(v).iter().any(|x| !x.is_zero())
    }

    /// Insert `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[T]) -> bool {
        let w = self.reduce(v);
        self.insert_reduced(w)
    }

    fn insert_reduced(&mut self, w: Vec<T>) -> bool {
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = T::one().div_ref(&w[p]);
        let w: Vec<T> = w.iter().map(|x| x.mul_ref(&inv)).collect();
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].neg_ref();
                axpy(row, &f, &w);
            }
        }
        self.rows.push((p, w));
        true
    }
}

/// Scalar matrices split into their two specializations and back.
pub fn split(m: &Matrix<Scalar>) -> [Matrix<RatFunc>; 2] {
    [m.map(|x| x.plus.clone()), m.map(|x| x.minus.clone())]
}

pub fn join(p: &Matrix<RatFunc>, n: &Matrix<RatFunc>) -> Matrix<Scalar> {
    assert_eq!((p.rows, p.cols), (n.rows, n.cols));
    Matrix::from_fn(p.rows, p.cols, |r, c| {
        Scalar::new(p.get(r, c).clone(), n.get(r, c).clone())
    })
}

pub fn split_vec(v: &[Scalar]) -> [Vec<RatFunc>; 2] {
    [
        v.iter().map(|x| x.plus.clone()).collect(),
        v.iter().map(|x| x.minus.clone()).collect(),
    ]
}

pub fn join_vec(p: &[RatFunc], n: &[RatFunc]) -> Vec<Scalar> {
    p.iter().zip(n).map(|(a, b)| Scalar::new(a.clone(), b.clone())).collect()
}

/// Inverse over Q(q)^pi, computed per specialization.
pub fn scalar_inverse(m: &Matrix<Scalar>) -> Option<Matrix<Scalar>> {
    let [p, n] = split(m);
    let (ip, inn) = rayon::join(|| inverse(&p), || inverse(&n));
    Some(join(&ip?, &inn?))
}

/// Rank per specialization.
pub fn scalar_ranks(m: &Matrix<Scalar>) -> (usize, usize) {
    let [p, n] = split(m);
    (rank(&p), rank(&n))
}

pub fn scalar_solve(m: &Matrix<Scalar>, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let [p, n] = split(m);
    let [bp, bn] = split_vec(b);
    Some(join_vec(&solve(&p, &bp)?, &solve(&n, &bn)?))
}

/// Null space over Q(q)^pi; `None` if the two specializations disagree in dimension.
pub fn scalar_nullspace(m: &Matrix<Scalar>) -> Option<Vec<Vec<Scalar>>> {
    let [p, n] = split(m);
    let kp = nullspace(&p);
    let kn = nullspace(&n);
    if kp.len() != kn.len() {
        return None;
    }
    Some(kp.iter().zip(&kn).map(|(a, b)| join_vec(a, b)).collect())
}

/// The earliest independent vectors among `images` with a left inverse on their span.
pub struct IndependentImages {
    pub chosen: Vec<usize>,
    rows: [Vec<usize>; 2],
    inv: [Matrix<RatFunc>; 2],
}

impl IndependentImages {
    /// `None` when the specializations disagree on which vectors are independent.
    pub fn select(images: &[Vec<Scalar>], dim: usize) -> Option<Self> {
        let mut eb = [EchelonBasis::new(dim), EchelonBasis::new(dim)];
        let mut chosen = Vec::new();
        for (k, v) in images.iter().enumerate() {
            let [p, m] = split_vec(v);
            let ip = eb[0].is_independent(&p);
            if ip != eb[1].is_independent(&m) {
                return None;
            }
            if ip {
                eb[0].insert(&p);
                eb[1].insert(&m);
                chosen.push(k);
            }
        }
        let b = Matrix::from_cols(
            &chosen.iter().map(|&k| images[k].clone()).collect::<Vec<_>>(),
            dim,
        );
        let [bp, bm] = split(&b);
        let left_inv = |m: &Matrix<RatFunc>| -> (Vec<usize>, Matrix<RatFunc>) {
            let (_, rows) = rref(&m.transpose());
            let sq = m.select_rows(&rows);
            (rows, inverse(&sq).expect("independent rows"))
        };
        let ((rp, ip), (rm, im)) = rayon::join(|| left_inv(&bp), || left_inv(&bm));
        Some(IndependentImages {
            chosen,
            rows: [rp, rm],
            inv: [ip, im],
        })
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// Coordinates of a vector in the span of the chosen images.
    pub fn coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        let [p, m] = split_vec(v);
        let pick = |x: &[RatFunc], rows: &[usize]| rows.iter().map(|&k| x[k].clone()).collect::<Vec<_>>();
        let xp = self.inv[0].mul_vec(&pick(&p, &self.rows[0]));
        let xm = self.inv[1].mul_vec(&pick(&m, &self.rows[1]));
        xp.into_iter().zip(xm).map(|(a, b)| Scalar::new(a, b)).collect()
    }
}

/// Integer solutions of `A z = b` for a fixed integer matrix `A`, by column reduction
/// `A U = H` with `U` unimodular and `H` in column echelon form.
pub struct IntegerSolver {
    /// Columns of `H`.
    h: Vec<Vec<BigInt>>,
    /// Columns of `U`.
    u: Vec<Vec<BigInt>>,
    /// `(row, column)` of each pivot.
    pivots: Vec<(usize, usize)>,
}

impl IntegerSolver {
    pub fn new(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let m = rows.len();
        let mut h: Vec<Vec<BigInt>> = (0..cols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
        let mut u: Vec<Vec<BigInt>> = (0..cols)
            .map(|j| (0..cols).map(|k| BigInt::from((j == k) as i32)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut p = 0;
        for i in 0..m {
            if p == cols {
                break;
            }
            loop {
                let live: Vec<usize> = (p..cols).filter(|&j| !h[j][i].is_zero()).collect();
                let Some(&best) = live.iter().min_by_key(|&&j| h[j][i].magnitude().clone()) else {
                    break;
                };
                h.swap(p, best);
                u.swap(p, best);
                if live.len() == 1 {
                    break;
                }
                for j in p + 1..cols {
                    if h[j][i].is_zero() {
                        continue;
                    }
                    let f = h[j][i].div_floor(&h[p][i]);
                    let (hp, hj) = pair_mut(&mut h, p, j);
                    for (a, b) in hj.iter_mut().zip(hp.iter()) {
                        *a -= &f * b;
                    }
                    let (up, uj) = pair_mut(&mut u, p, j);
                    for (a, b) in uj.iter_mut().zip(up.iter()) {
                        *a -= &f * b;
                    }
                }
            }
            if p < cols && !h[p][i].is_zero() {
                pivots.push((i, p));
                p += 1;
            }
        }
        IntegerSolver { h, u, pivots }
    }

    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let cols = self.u.len();
        let mut w = vec![BigInt::zero(); cols];
        for &(i, k) in &self.pivots {
            let mut s = b[i].clone();
            for (kk, wk) in w.iter().enumerate().take(k) {
                s -= &self.h[kk][i] * wk;
            }
            let (q, r) = s.div_rem(&self.h[k][i]);
            if !r.is_zero() {
                return None;
            }
            w[k] = q;
        }
        for (i, bi) in b.iter().enumerate() {
            let s: BigInt = (0..cols).map(|k| &self.h[k][i] * &w[k]).sum();
            if &s != bi {
                return None;
            }
        }
        let mut z = vec![BigInt::zero(); cols];
        for (k, wk) in w.iter().enumerate() {
            if wk.is_zero() {
                continue;
            }
            for (a, b) in z.iter_mut().zip(&self.u[k]) {
                *a += wk * b;
            }
        }
        Some(z)
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    debug_assert!(a < b);
    let (lo, hi) = v.split_at_mut(b);
    (&mut lo[a], &mut hi[0])
}

pub fn scalar_vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn qm(rows: &[&[i64]]) -> Matrix<BigRational> {
        let cols = rows[0].len();
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
            cols,
        )
    }

    #[test]
    fn rank_and_kernel() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let k = nullspace(&m);
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn inverse_round_trip() {
        let m = qm(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(inverse(&qm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn echelon_insertion() {
        let mut e = EchelonBasis::new(3);
        let v = |a: &[i64]| -> Vec<BigRational> {
            a.iter().map(|&x| BigRational::from_integer(x.into())).collect()
        };
        assert!(e.insert(&v(&[1, 1, 0])));
        assert!(e.insert(&v(&[0, 1, 1])));
        assert!(!e.insert(&v(&[1, 2, 1])));
        assert!(e.insert(&v(&[0, 0, 5])));
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn integer_solutions() {
        let z = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        // 2x + 4y = 6 has integer solutions, 2x + 4y = 3 has none
        let s = IntegerSolver::new(&[z(&[2, 4])], 2);
        let x = s.solve(&z(&[6])).unwrap();
        assert_eq!(&x[0] * 2 + &x[1] * 4, BigInt::from(6));
        assert!(s.solve(&z(&[3])).is_none());
        // x + y = 1, x - y = 0 is solvable over Q only
        let s = IntegerSolver::new(&[z(&[1, 1]), z(&[1, -1])], 2);
        assert!(s.solve(&z(&[1, 0])).is_none());
        assert_eq!(s.solve(&z(&[3, 1])).unwrap(), z(&[2, 1]));
    }

    #[test]
    fn scalar_matrix_inverse() {
        let q = Scalar::q();
        let m = Matrix::from_rows(
            vec![vec![Scalar::one(), q.clone()], vec![Scalar::pi(), Scalar::one()]],
            2,
        );
        let inv = scalar_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
    }
}
