//! Dense univariate polynomials in `q`, generic over the coefficient ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Num, One, Signed, Zero};

/// Coefficient ring bound used throughout.
pub trait Coeff: Num + Clone + Neg<Output = Self> + fmt::Debug {}
impl<T: Num + Clone + Neg<Output = T> + fmt::Debug> Coeff for T {}

/// Coefficients stored low degree first; never has trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// `c * q^k`
    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Poly { coeffs: v }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn lead(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Exponent of the lowest nonzero term.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Is this `c * q^k` for a single term?
    pub fn is_monomial(&self) -> bool {
        match self.low_degree() {
            Some(k) => k + 1 == self.coeffs.len(),
            None => false,
        }
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut v = vec![T::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Divide by `q^k`; the caller guarantees the low terms vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// `p(c q)` for a constant `c`.
    pub fn substitute_scaled(&self, c: &T) -> Self {
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.clone() * pow.clone());
            pow = pow * c.clone();
        }
        Poly::new(out)
    }

    /// Coefficients reversed against `q^deg`: `q^deg p(1/q)`.
    pub fn reversed(&self) -> Self {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::new(v)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc * x.clone() + a.clone();
        }
        acc
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Coeff> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Coeff> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Coeff> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Coeff> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}

impl<T: Coeff> Zero for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Coeff> One for Poly<T> {
    fn one() -> Self {
        Poly::one()
    }
}

pub type IntPoly = Poly<BigInt>;

impl IntPoly {
    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive_part(&self) -> IntPoly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        self.div_scalar_exact(&c)
    }

    pub fn div_scalar_exact(&self, c: &BigInt) -> IntPoly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| a / c).collect(),
        }
    }

    /// Pseudo-remainder of `self` by `d`.
    fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.lead().unwrap().clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let rl = r.lead().unwrap().clone();
            let t = Poly::monomial(rl, rd - dd);
            r = &r.scale(&lc) - &(&t * d);
        }
        r
    }

    /// Primitive gcd over Z[q] with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.normalize_sign().primitive_part();
        }
        if other.is_zero() {
            return self.normalize_sign().primitive_part();
        }
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            if b.degree() == Some(0) {
                return IntPoly::one();
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.normalize_sign()
    }

    pub fn normalize_sign(&self) -> IntPoly {
        match self.lead() {
            Some(l) if l.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Exact quotient over Z[q]; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.lead().unwrap().clone();
        let mut r = self.clone();
        let mut quot = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let (c, rem) = r.lead().unwrap().div_rem(&lc);
            assert!(rem.is_zero(), "inexact polynomial division");
            let t = Poly::monomial(c.clone(), rd - dd);
            quot[rd - dd] = c;
            r = &r - &(&t * d);
        }
        assert!(r.is_zero(), "inexact polynomial division");
        Poly::new(quot)
    }
}

impl<T: Coeff + fmt::Display + Signed> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().enumerate().map(|(k, c)| (k as i64, c)))
    }
}

/// Render `sum c_k q^k`, highest exponent first.
pub(crate) fn write_terms<'a, T: Coeff + fmt::Display + Signed + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl DoubleEndedIterator<Item = (i64, &'a T)>,
) -> fmt::Result {
    let mut first = true;
    for (k, c) in terms.rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let unit = a.is_one();
        match (k, unit) {
            (0, _) => write!(f, "{a}")?,
            (_, true) => write!(f, "{}", qpow(k))?,
            (_, false) => write!(f, "{a}*{}", qpow(k))?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn qpow(k: i64) -> String {
    match k {
        1 => "q".to_string(),
        k if k < 0 => format!("q^({k})"),
        k => format!("q^{k}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> IntPoly {
        Poly::new(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn trims_and_multiplies() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
    }

    #[test]
    fn gcd_of_shared_factor() {
        let a = &p(&[-1, 0, 1]) * &p(&[2, 3]);
        let b = &p(&[1, 1]) * &p(&[5, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        assert_eq!(p(&[6, 12]).gcd(&p(&[0, 4])), IntPoly::one());
    }

    #[test]
    fn exact_division() {
        let a = &p(&[1, -1, 1]) * &p(&[3, 0, 2]);
        assert_eq!(a.div_exact(&p(&[3, 0, 2])), p(&[1, -1, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -2, 0, 1]).to_string(), "q^3 - 2*q + 1");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }
}
