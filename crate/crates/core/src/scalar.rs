//! The ring Q(q)^pi, stored through its two specializations pi = +1 and pi = -1.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{QpiError, Result};
use crate::ratfunc::RatFunc;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    pub plus: RatFunc,
    pub minus: RatFunc,
}

/// Order of vanishing at q = 0, minimum over both components; `None` is +infinity.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct QOrder(pub Option<i64>);

impl QOrder {
    pub fn is_regular(&self) -> bool {
        self.0.is_none_or(|v| v >= 0)
    }
}

/// A value of Q^pi: the pair (value at pi = 1, value at pi = -1).
pub type PiRational = (BigRational, BigRational);

impl Scalar {
    pub fn new(plus: RatFunc, minus: RatFunc) -> Self {
        Scalar { plus, minus }
    }

    /// Both specializations equal to `f`.
    pub fn from_ratfunc(f: RatFunc) -> Self {
        Scalar {
            plus: f.clone(),
            minus: f,
        }
    }

    pub fn zero() -> Self {
        Self::from_ratfunc(RatFunc::zero())
    }

    pub fn one() -> Self {
        Self::from_ratfunc(RatFunc::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratfunc(RatFunc::from_int(n))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_ratfunc(RatFunc::from_rational(r))
    }

    pub fn from_pi_rational(v: &PiRational) -> Self {
        Scalar::new(RatFunc::from_rational(&v.0), RatFunc::from_rational(&v.1))
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    pub fn q_pow(k: i64) -> Self {
        Self::from_ratfunc(RatFunc::q_pow(k))
    }

    pub fn pi() -> Self {
        Scalar::new(RatFunc::one(), RatFunc::from_int(-1))
    }

    /// `pi^e`.
    pub fn pi_pow(e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Self::one()
        } else {
            Self::pi()
        }
    }

    /// `(pi^pe) q^qe`.
    pub fn pi_q(pe: i64, qe: i64) -> Self {
        let m = RatFunc::q_pow(qe);
        if pe.rem_euclid(2) == 0 {
            Self::from_ratfunc(m)
        } else {
            Scalar::new(m.clone(), -&m)
        }
    }

    /// `a + b pi`.
    pub fn from_even_odd(a: &RatFunc, b: &RatFunc) -> Self {
        Scalar::new(a + b, a - b)
    }

    /// `(a, b)` with `self = a + b pi`.
    pub fn even_odd(&self) -> (RatFunc, RatFunc) {
        let half = RatFunc::from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)));
        (
            &(&self.plus + &self.minus) * &half,
            &(&self.plus - &self.minus) * &half,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.plus.is_zero() && self.minus.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.plus.is_one() && self.minus.is_one()
    }

    /// Exactly one specialization vanishes.
    pub fn is_zero_divisor(&self) -> bool {
        self.plus.is_zero() != self.minus.is_zero()
    }

    pub fn is_invertible(&self) -> bool {
        !self.plus.is_zero() && !self.minus.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(QpiError::DivisionByZeroDivisor);
        }
        Ok(Scalar::new(self.plus.inv()?, self.minus.inv()?))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// The bar involution `q -> pi q^{-1}`.
    pub fn bar(&self) -> Self {
        Scalar::new(self.plus.invert_variable(1), self.minus.invert_variable(-1))
    }

    /// Multiplication by `pi`.
    pub fn pi_flip(&self) -> Self {
        Scalar::new(self.plus.clone(), -&self.minus)
    }

    pub fn valuation(&self) -> QOrder {
        match (self.plus.valuation(), self.minus.valuation()) {
            (None, None) => QOrder(None),
            (Some(a), None) | (None, Some(a)) => QOrder(Some(a)),
            (Some(a), Some(b)) => QOrder(Some(a.min(b))),
        }
    }

    pub fn is_regular_at_zero(&self) -> bool {
        self.plus.is_regular_at_zero() && self.minus.is_regular_at_zero()
    }

    pub fn eval_at_q0(&self) -> Result<PiRational> {
        Ok((self.plus.eval_at_q0()?, self.minus.eval_at_q0()?))
    }

    pub fn pow(&self, e: i64) -> Self {
        Scalar::new(self.plus.pow(e), self.minus.pow(e))
    }

    /// Both specializations are integer Laurent polynomials congruent mod 2,
    /// i.e. the value lies in Z[q, q^-1]^pi.
    pub fn is_integral_laurent(&self) -> bool {
        if !self.plus.is_integral_laurent() || !self.minus.is_integral_laurent() {
            return false;
        }
        let d = &self.plus - &self.minus;
        let (_, c) = d.laurent(d.valuation().unwrap_or(0) + 64);
        c.iter().all(|x| x.is_integer() && (x.to_integer() % BigInt::from(2)).is_zero())
    }

    pub fn specialize(&self, sign: i8) -> &RatFunc {
        if sign > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn component(&self, k: usize) -> &RatFunc {
        if k == 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

/// `[n]` with `q_i = q^d`, `pi_i = pi` if `odd` else 1.
pub fn qpi_integer(n: i64, d: u32, odd: bool) -> Scalar {
    let comp = |s: i64| -> RatFunc {
        let pi_i = if odd { s } else { 1 };
        let d = d as i64;
        if n >= 0 {
            let mut acc = RatFunc::zero();
            for k in 0..n {
                let c = if k % 2 == 1 { pi_i } else { 1 };
                acc = &acc + &RatFunc::monomial(BigInt::from(c), d * (2 * k - n + 1));
            }
            acc
        } else {
            let pq = RatFunc::monomial(BigInt::from(pi_i), d);
            let num = &pq.pow(n) - &RatFunc::q_pow(-d * n);
            let den = &pq - &RatFunc::q_pow(-d);
            &num / &den
        }
    };
    Scalar::new(comp(1), comp(-1))
}

/// `[n]!` for `n >= 0`.
pub fn qpi_factorial(n: u32, d: u32, odd: bool) -> Scalar {
    let mut acc = Scalar::one();
    for k in 1..=n as i64 {
        acc = &acc * &qpi_integer(k, d, odd);
    }
    acc
}

/// `prod_{t=1..a} [n + t - a] / [a]!`.
pub fn qpi_binomial(n: i64, a: u32, d: u32, odd: bool) -> Scalar {
    let mut num = Scalar::one();
    for t in 1..=a as i64 {
        num = &num * &qpi_integer(n + t - a as i64, d, odd);
    }
    &num / &qpi_factorial(a, d, odd)
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.plus + &rhs.plus, &self.minus + &rhs.minus)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.plus - &rhs.plus, &self.minus - &rhs.minus)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.plus * &rhs.plus, &self.minus * &rhs.minus)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by a zero divisor")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-&self.plus, -&self.minus)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.even_odd();
        if b.is_zero() {
            return write!(f, "{a}");
        }
        let bs = pi_terms(&b);
        if a.is_zero() {
            return match bs.strip_prefix("+ ") {
                Some(rest) => write!(f, "{rest}"),
                None => write!(f, "-{}", &bs[2..]),
            };
        }
        write!(f, "{a} {bs}")
    }
}

/// Render `b * pi` term by term, with a leading sign token.
fn pi_terms(b: &RatFunc) -> String {
    let s = b.to_string();
    if s.starts_with('(') {
        return format!("+ {s}*pi");
    }
    let mut out = String::new();
    let mut sign = "+";
    for tok in s.split(' ') {
        match tok {
            "+" | "-" => sign = if tok == "+" { "+" } else { "-" },
            t => {
                let (sg, body) = match t.strip_prefix('-') {
                    Some(rest) => (if sign == "+" { "-" } else { "+" }, rest),
                    None => (sign, t),
                };
                if !out.is_empty() {
                    out.push(' ');
                }
                if body == "1" {
                    out.push_str(&format!("{sg} pi"));
                } else {
                    out.push_str(&format!("{sg} {body}*pi"));
                }
                sign = "+";
            }
        }
    }
    out
}

impl std::str::FromStr for Scalar {
    type Err = QpiError;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            toks: tokenize(s)?,
            pos: 0,
        };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(QpiError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Q,
    Pi,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Int(text.parse().unwrap()));
        } else if c == 'q' {
            out.push(Tok::Q);
            i += 1;
        } else if c == 'p' && chars.get(i + 1) == Some(&'i') {
            out.push(Tok::Pi);
            i += 2;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(QpiError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let t = self.unary()?;
            acc = if c == '*' { &acc * &t } else { acc.checked_div(&t)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let e = self.exponent()?;
            if e < 0 && !base.is_invertible() {
                return Err(QpiError::DivisionByZeroDivisor);
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let neg_then = |p: &mut Parser| -> Result<i64> {
            let neg = if p.peek_op() == Some('-') {
                p.pos += 1;
                true
            } else {
                false
            };
            match p.toks.get(p.pos) {
                Some(Tok::Int(n)) => {
                    p.pos += 1;
                    let v: i64 = n
                        .try_into()
                        .map_err(|_| QpiError::Parse("exponent too large".into()))?;
                    Ok(if neg { -v } else { v })
                }
                _ => Err(QpiError::Parse("expected integer exponent".into())),
            }
        };
        if self.peek_op() == Some('(') {
            self.pos += 1;
            let e = neg_then(self)?;
            if self.peek_op() != Some(')') {
                return Err(QpiError::Parse("expected ')'".into()));
            }
            self.pos += 1;
            return Ok(e);
        }
        neg_then(self)
    }

    fn atom(&mut self) -> Result<Scalar> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Scalar::from_ratfunc(RatFunc::from_bigint(n)))
            }
            Some(Tok::Q) => {
                self.pos += 1;
                Ok(Scalar::q())
            }
            Some(Tok::Pi) => {
                self.pos += 1;
                Ok(Scalar::pi())
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(QpiError::Parse("expected ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            other => Err(QpiError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn pi_squares_to_one() {
        assert_eq!(&Scalar::pi() * &Scalar::pi(), Scalar::one());
        let a = &Scalar::one() + &Scalar::pi();
        let b = &Scalar::one() - &Scalar::pi();
        assert!((&a * &b).is_zero());
        assert!(a.is_zero_divisor());
    }

    #[test]
    fn product_recombines() {
        let x = &Scalar::q() + &(&Scalar::pi() * &Scalar::q_pow(-1));
        assert_eq!(&x * &Scalar::q(), s("q^2 + pi"));
    }

    #[test]
    fn bar_on_monomials() {
        assert_eq!(Scalar::q().bar(), s("pi*q^(-1)"));
        assert_eq!(Scalar::q_pow(3).bar(), s("pi*q^(-3)"));
        assert_eq!(Scalar::one().bar(), Scalar::one());
    }

    #[test]
    fn small_qpi_integers() {
        assert_eq!(qpi_integer(1, 1, true), Scalar::one());
        assert_eq!(qpi_integer(2, 1, true), s("pi*q + q^(-1)"));
        assert!(qpi_integer(0, 1, true).is_zero());
        assert_eq!(qpi_binomial(2, 1, 1, true), qpi_integer(2, 1, true));
        assert_eq!(qpi_binomial(7, 0, 1, true), Scalar::one());
    }

    #[test]
    fn negative_integer_from_formula() {
        // with x = pi q, y = 1/q: x^-n - y^-n = -(x^n - y^n)/(xy)^n and xy = pi
        for n in 1..6 {
            let lhs = qpi_integer(-n, 1, true);
            let rhs = -&(&Scalar::pi_pow(n) * &qpi_integer(n, 1, true));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn q0_values() {
        assert_eq!(
            Scalar::pi().eval_at_q0().unwrap(),
            (BigRational::one(), -BigRational::one())
        );
        let v = (&qpi_integer(2, 1, true) * &Scalar::q()).eval_at_q0().unwrap();
        assert_eq!(v, (BigRational::one(), BigRational::one()));
        assert_eq!(Scalar::q_pow(-1).eval_at_q0(), Err(QpiError::NotRegularAtZero));
    }

    #[test]
    fn display_round_trip() {
        for x in ["q^2 + pi", "pi*q + q^(-1)", "(1 - q)/(1 + q^2) - 3*pi", "-pi", "0", "q*pi - 2"] {
            let v = s(x);
            assert_eq!(s(&v.to_string()), v, "{x} -> {v}");
        }
        assert_eq!(s("pi*q + q^(-1)").to_string(), "q^(-1) + q*pi");
        assert_eq!(s("q^2 - pi").to_string(), "q^2 - pi");
    }
}
