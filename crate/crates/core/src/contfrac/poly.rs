//! Univariate polynomials over Z and Q, and rational functions over Q.

use rug::{Integer, Rational};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Integer polynomial in `k`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<Integer>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&x| Integer::from(x)).collect())
    }

    /// Product of factors given as coefficient slices.
    pub fn product(factors: &[&[i64]]) -> Self {
        factors
            .iter()
            .fold(IntPoly::from_i64(&[1]), |acc, f| &acc * &IntPoly::from_i64(f))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Integer {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, k: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= k;
            acc += c;
        }
        acc
    }

    pub fn eval_i64(&self, k: i64) -> Integer {
        self.eval(&Integer::from(k))
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(c.clone())).collect())
    }

    /// Scale by an integer.
    pub fn scale(&self, s: i64) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(c * s)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Integer::from(a * b);
            }
        }
        IntPoly::new(out)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Vec<Integer>, i: usize| v.get(i).cloned().unwrap_or_default();
        IntPoly::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, o: &IntPoly) -> IntPoly {
        self + &(-o)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(-c)).collect())
    }
}

fn write_poly<T: fmt::Display + PartialEq<i32> + PartialOrd<i32>>(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[T],
    abs: impl Fn(&T) -> String,
) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if *c == 0 {
            continue;
        }
        let neg = *c < 0;
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let a = abs(c);
        match i {
            0 => write!(f, "{a}")?,
            _ => {
                if a != "1" {
                    write!(f, "{a}*")?;
                }
                if i == 1 {
                    write!(f, "k")?;
                } else {
                    write!(f, "k^{i}")?;
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs, |c| Integer::from(c.abs_ref()).to_string())
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }
}

/// Polynomial over Q in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = QPoly { coeffs };
        while p.coeffs.last().is_some_and(|c| *c == 0) {
            p.coeffs.pop();
        }
        p
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn from_i64(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, k: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= k;
            acc += c;
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// `p(k + s)`.
    pub fn shift(&self, s: i64) -> QPoly {
        let lin = QPoly::from_i64(&[s, 1]);
        let mut acc = QPoly::default();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &QPoly::constant(c.clone());
        }
        acc
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap_or(0);
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::new(); self.coeffs.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let c = Rational::from(&r[top] / &lead);
            if c != 0 {
                for (i, x) in d.coeffs.iter().enumerate() {
                    r[top - dd + i] -= Rational::from(&c * x);
                }
            }
            q[top - dd] = c;
            r.pop();
            while r.last().is_some_and(|x| *x == 0) {
                r.pop();
            }
        }
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = Rational::from(self.leading().recip_ref());
        self.scale(&l)
    }

    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale to a primitive integer polynomial with positive leading coefficient.
    pub fn to_primitive_int(&self) -> IntPoly {
        let mut l = Integer::from(1);
        for c in &self.coeffs {
            l.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * Integer::from(&l / c.denom()))
            .collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        if g == 0 {
            return IntPoly::default();
        }
        if ints.last().is_some_and(|c| *c < 0) {
            g = -g;
        }
        IntPoly::new(ints.into_iter().map(|c| c.div_exact(&g)).collect())
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Vec<Rational>, i: usize| v.get(i).cloned().unwrap_or_default();
        QPoly::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        self + &(-o)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::default();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        QPoly::new(out)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs, |c| Rational::from(c.abs_ref()).to_string())
    }
}

/// Reduced rational function `num/den` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: QPoly,
    pub den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = QPoly::gcd(&num, &den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = Rational::from(d.leading().recip_ref());
        RatFunc {
            num: n.scale(&l),
            den: d.scale(&l),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: QPoly::default(),
            den: QPoly::from_i64(&[1]),
        }
    }

    pub fn poly(p: QPoly) -> Self {
        RatFunc::new(p, QPoly::from_i64(&[1]))
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::poly(QPoly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn shift(&self, s: i64) -> RatFunc {
        RatFunc::new(self.num.shift(s), self.den.shift(s))
    }

    pub fn recip(&self) -> RatFunc {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn eval(&self, k: &Rational) -> Option<Rational> {
        let d = self.den.eval(k);
        if d == 0 {
            None
        } else {
            Some(self.num.eval(k) / d)
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
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
