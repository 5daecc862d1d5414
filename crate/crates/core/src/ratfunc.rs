//! Exact rational functions in `q` with integer coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::QpiError;
use crate::poly::{IntPoly, Poly};

/// `num / den` in lowest terms: coprime over Q[q], joint integer content 1,
/// positive leading coefficient of `den`. Equal values have equal fields.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: IntPoly,
    den: IntPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RatFunc {
            num: Poly::constant(n),
            den: IntPoly::one(),
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::reduce(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        Self::monomial(BigInt::one(), k)
    }

    /// `c q^k`.
    pub fn monomial(c: BigInt, k: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            RatFunc {
                num: Poly::monomial(c, k as usize),
                den: IntPoly::one(),
            }
        } else {
            RatFunc {
                num: Poly::constant(c),
                den: Poly::monomial(BigInt::one(), (-k) as usize),
            }
        }
    }

    pub fn from_poly(p: IntPoly) -> Self {
        RatFunc { num: p, den: IntPoly::one() }
    }

    /// Laurent polynomial `sum c_j q^(low + j)`.
    pub fn from_laurent(low: i64, coeffs: &[BigRational]) -> Self {
        let mut acc = Self::zero();
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(&Self::from_rational(c) * &Self::q_pow(low + j as i64));
        }
        acc
    }

    /// Build and normalize `num / den`.
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, QpiError> {
        if den.is_zero() {
            return Err(QpiError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn numer(&self) -> &IntPoly {
        &self.num
    }

    pub fn denom(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.degree() == Some(0) && self.num == self.den
    }

    fn reduce(num: IntPoly, den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let s = num.low_degree().unwrap().min(den.low_degree().unwrap());
        let (mut num, mut den) = (num.shift_down(s), den.shift_down(s));
        if !den.is_monomial() && !num.is_monomial() {
            let g = num.gcd(&den);
            if g.degree().unwrap_or(0) > 0 {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        let c = num.content().gcd(&den.content());
        let mut c = if c.is_zero() { BigInt::one() } else { c };
        if den.lead().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        RatFunc { num, den }
    }

    /// Order of vanishing at `q = 0`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let n = self.num.low_degree()? as i64;
        Some(n - self.den.low_degree().unwrap() as i64)
    }

    pub fn is_regular_at_zero(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }

    /// Value at `q = 0`.
    pub fn eval_at_q0(&self) -> Result<BigRational, QpiError> {
        match self.valuation() {
            None => Ok(BigRational::zero()),
            Some(v) if v < 0 => Err(QpiError::NotRegularAtZero),
            Some(v) if v > 0 => Ok(BigRational::zero()),
            Some(_) => Ok(BigRational::new(self.num.coeff(0), self.den.coeff(0))),
        }
    }

    /// Laurent coefficients at `q^low, ..., q^upto` where `low` is the valuation.
    pub fn laurent(&self, upto: i64) -> (i64, Vec<BigRational>) {
        let Some(v) = self.valuation() else {
            return (0, Vec::new());
        };
        let a = self.num.low_degree().unwrap();
        let b = self.den.low_degree().unwrap();
        let num = self.num.shift_down(a);
        let den = self.den.shift_down(b);
        let len = if upto < v { 0 } else { (upto - v + 1) as usize };
        let d0 = BigRational::from_integer(den.coeff(0));
        let mut out: Vec<BigRational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = BigRational::from_integer(num.coeff(k));
            for j in 1..=k.min(den.degree().unwrap()) {
                acc -= BigRational::from_integer(den.coeff(j)) * &out[k - j];
            }
            out.push(acc / &d0);
        }
        (v, out)
    }

    /// `f(c/q)` for `c = +-1`.
    pub fn invert_variable(&self, c: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let cb = BigInt::from(c);
        let n = self.num.degree().unwrap() as i64;
        let m = self.den.degree().unwrap() as i64;
        let mut rn = self.num.substitute_scaled(&cb).reversed();
        let mut rd = self.den.substitute_scaled(&cb).reversed();
        match (m - n).cmp(&0) {
            Ordering::Greater => rn = rn.shift_up((m - n) as usize),
            Ordering::Less => rd = rd.shift_up((n - m) as usize),
            Ordering::Equal => {}
        }
        Self::reduce(rn, rd)
    }

    /// `f(-q)`.
    pub fn negate_variable(&self) -> Self {
        let c = BigInt::from(-1);
        Self::reduce(self.num.substitute_scaled(&c), self.den.substitute_scaled(&c))
    }

    pub fn inv(&self) -> Result<Self, QpiError> {
        if self.is_zero() {
            return Err(QpiError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Is this a Laurent polynomial with integer coefficients?
    pub fn is_integral_laurent(&self) -> bool {
        self.den.is_monomial() && self.den.lead().unwrap().is_one()
    }
}

/// `v` rescaled to a primitive vector of polynomials spanning the same line.
pub fn primitive_vector(v: &[RatFunc]) -> Vec<RatFunc> {
    let mut l = IntPoly::one();
    for x in v.iter().filter(|x| !x.is_zero()) {
        let g = l.gcd(&x.den);
        l = &l * &x.den.div_exact(&g);
    }
    let nums: Vec<IntPoly> = v
        .iter()
        .map(|x| if x.is_zero() { IntPoly::zero() } else { &x.num * &l.div_exact(&x.den) })
        .collect();
    let mut g = IntPoly::zero();
    for n in nums.iter().filter(|n| !n.is_zero()) {
        g = g.gcd(n);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let quots: Vec<IntPoly> = nums.iter().map(|n| if n.is_zero() { n.clone() } else { n.div_exact(&g) }).collect();
    let c = quots.iter().fold(BigInt::zero(), |c, n| c.gcd(&n.content()));
    quots
        .into_iter()
        .map(|n| RatFunc::from_poly(n.div_scalar_exact(&c)))
        .collect()
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::reduce(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_monomial() && rhs.den.is_monomial() {
            return add_laurent(self, rhs);
        }
        let g = self.den.gcd(&rhs.den);
        if g.degree().unwrap_or(0) > 0 {
            let b1 = self.den.div_exact(&g);
            let d1 = rhs.den.div_exact(&g);
            let num = &(&self.num * &d1) + &(&rhs.num * &b1);
            return RatFunc::reduce(num, &b1 * &rhs.den);
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::reduce(num, &self.den * &rhs.den)
    }
}

fn add_laurent(a: &RatFunc, b: &RatFunc) -> RatFunc {
    let ka = a.den.degree().unwrap();
    let kb = b.den.degree().unwrap();
    let ca = a.den.lead().unwrap();
    let cb = b.den.lead().unwrap();
    let l = ca.lcm(cb);
    let k = ka.max(kb);
    let na = a.num.shift_up(k - ka).scale(&(&l / ca));
    let nb = b.num.shift_up(k - kb).scale(&(&l / cb));
    RatFunc::reduce(&na + &nb, Poly::monomial(l, k))
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_monomial() && rhs.den.is_monomial() {
            return RatFunc::reduce(&self.num * &rhs.num, &self.den * &rhs.den);
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (a, d) = if g1.degree().unwrap_or(0) > 0 {
            (self.num.div_exact(&g1), rhs.den.div_exact(&g1))
        } else {
            (self.num.clone(), rhs.den.clone())
        };
        let (c, b) = if g2.degree().unwrap_or(0) > 0 {
            (rhs.num.div_exact(&g2), self.den.div_exact(&g2))
        } else {
            (rhs.num.clone(), self.den.clone())
        };
        RatFunc::reduce_coprime(&a * &c, &b * &d)
    }
}

impl RatFunc {
    /// Normalize when `num` and `den` are already coprime over Q[q].
    fn reduce_coprime(mut num: IntPoly, mut den: IntPoly) -> Self {
        let c = num.content().gcd(&den.content());
        let mut c = if c.is_zero() { BigInt::one() } else { c };
        if den.lead().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        RatFunc { num, den }
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.inv().expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_monomial() {
            // Laurent form: sum of c q^k with rational c
            let k = self.den.degree().unwrap() as i64;
            let c = self.den.lead().unwrap();
            if c.is_one() {
                return crate::poly::write_terms(
                    f,
                    self.num.coeffs().iter().enumerate().map(|(j, a)| (j as i64 - k, a)),
                );
            }
            let coeffs: Vec<BigRational> = self
                .num
                .coeffs()
                .iter()
                .map(|a| BigRational::new(a.clone(), c.clone()))
                .collect();
            return crate::poly::write_terms(
                f,
                coeffs.iter().enumerate().map(|(j, a)| (j as i64 - k, a)),
            );
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> IntPoly {
        Poly::new(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = RatFunc::new(p(&[-2, 0, 2]), p(&[-2, -2])).unwrap();
        let b = RatFunc::new(p(&[1, -1]), p(&[1])).unwrap();
        assert_eq!(a, b);
        let c = RatFunc::new(p(&[1]), p(&[2, 2])).unwrap();
        assert_eq!(c.denom(), &p(&[2, 2]));
    }

    #[test]
    fn laurent_arithmetic() {
        let x = &RatFunc::q_pow(-1) + &RatFunc::q_pow(2);
        assert_eq!(x.to_string(), "q^2 + q^(-1)");
        assert_eq!((&x * &RatFunc::q_pow(1)).to_string(), "q^3 + 1");
        assert_eq!(x.valuation(), Some(-1));
    }

    #[test]
    fn invert_variable_of_quotient() {
        // (1+q)/(1-q) at q -> 1/q is (q+1)/(q-1)
        let f = RatFunc::new(p(&[1, 1]), p(&[1, -1])).unwrap();
        let g = f.invert_variable(1);
        assert_eq!(g, RatFunc::new(p(&[1, 1]), p(&[-1, 1])).unwrap());
        assert_eq!(g.invert_variable(1), f);
    }

    #[test]
    fn series_expansion() {
        // 1/(1-q^2) = 1 + q^2 + q^4 + ...
        let f = RatFunc::new(p(&[1]), p(&[1, 0, -1])).unwrap();
        let (v, c) = f.laurent(4);
        assert_eq!(v, 0);
        let ints: Vec<i64> = c.iter().map(|r| r.to_integer().try_into().unwrap()).collect();
        assert_eq!(ints, vec![1, 0, 1, 0, 1]);
    }
}
