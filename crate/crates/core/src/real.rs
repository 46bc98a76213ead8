//! Precision control and floating values with a rigorous-ish error radius.

use rug::float::Round;
use rug::ops::{AddAssignRound, AssignRound, Pow};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Precision used for error radii.
pub(crate) const RADIUS_PREC: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    pub target_digits: u32,
    pub guard_digits: u32,
}

impl Precision {
    pub const DEFAULT_GUARD: u32 = 10;

    pub fn digits(target_digits: u32) -> Self {
        Precision {
            target_digits,
            guard_digits: Self::DEFAULT_GUARD,
        }
    }

    pub fn new(target_digits: u32, guard_digits: u32) -> Self {
        Precision {
            target_digits,
            guard_digits,
        }
    }

    /// Working precision in bits.
    pub fn bits(&self) -> u32 {
        bits_for_digits(self.target_digits + self.guard_digits) + 8
    }

    /// Absolute target tolerance `10^-target_digits`.
    pub fn tolerance(&self) -> Float {
        pow10(-(self.target_digits as i64), self.bits())
    }

    pub fn with_extra(&self, digits: u32) -> Self {
        Precision {
            target_digits: self.target_digits + digits,
            guard_digits: self.guard_digits,
        }
    }
}

pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32
}

pub fn digits_for_bits(bits: u32) -> u32 {
    (bits as f64 / LOG2_10).floor() as u32
}

pub fn pow10(e: i64, prec: u32) -> Float {
    let ten = Float::with_val(prec, 10);
    ten.pow(e)
}

/// Unit in the last place of `x` at its own precision (zero maps to the smallest positive).
pub(crate) fn ulp(x: &Float) -> Float {
    match x.get_exp() {
        Some(e) => {
            let mut u = Float::with_val(RADIUS_PREC, 1);
            u <<= e - x.prec() as i32;
            u
        }
        None => Float::with_val(RADIUS_PREC, 0),
    }
}

fn radius(x: &Float) -> Float {
    let mut r = Float::new(RADIUS_PREC);
    r.assign_round(x.abs_ref(), Round::Up);
    r
}

/// A floating value together with an error radius: the true value lies in
/// `[value - radius, value + radius]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BigReal {
    value: Float,
    radius: Float,
}

impl BigReal {
    pub fn new(value: Float, radius: Float) -> Self {
        let radius = self::radius(&radius);
        BigReal { value, radius }
    }

    /// Value known up to its own rounding.
    pub fn rounded(value: Float) -> Self {
        let r = ulp(&value);
        BigReal::new(value, r)
    }

    pub fn exact(value: Float) -> Self {
        BigReal {
            value,
            radius: Float::with_val(RADIUS_PREC, 0),
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        BigReal::rounded(Float::with_val(prec, q))
    }

    pub fn from_integer(z: &Integer, prec: u32) -> Self {
        let v = Float::with_val(prec, z);
        let exact = v.to_integer().unwrap_or_default() == *z;
        if exact {
            BigReal::exact(v)
        } else {
            BigReal::rounded(v)
        }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn radius(&self) -> &Float {
        &self.radius
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn into_parts(self) -> (Float, Float) {
        (self.value, self.radius)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Widen the radius by `extra`.
    pub fn widen(mut self, extra: &Float) -> Self {
        let mut r = Float::with_val(RADIUS_PREC, &self.radius);
        r.add_assign_round(Float::with_val(RADIUS_PREC, extra.abs_ref()), Round::Up);
        self.radius = r;
        self
    }

    /// Whether `x` lies within the enclosure.
    pub fn contains(&self, x: &Float) -> bool {
        let d = Float::with_val(self.prec().max(x.prec()), &self.value - x).abs();
        d <= self.radius
    }

    /// Whether the two enclosures intersect.
    pub fn overlaps(&self, other: &BigReal) -> bool {
        let p = self.prec().max(other.prec());
        let d = Float::with_val(p, &self.value - &other.value).abs();
        let r = Float::with_val(RADIUS_PREC, &self.radius + &other.radius);
        d <= r
    }

    /// Number of correct decimal digits implied by the radius relative to the value.
    pub fn correct_digits(&self) -> i64 {
        if self.radius.is_zero() {
            return digits_for_bits(self.prec()) as i64;
        }
        let r = self.radius.to_f64().log10();
        let v = self.value.to_f64().abs();
        let scale = if v > 0.0 { v.log10().max(0.0) } else { 0.0 };
        (scale - r).floor() as i64
    }

    pub fn abs(&self) -> BigReal {
        BigReal {
            value: self.value.clone().abs(),
            radius: self.radius.clone(),
        }
    }

    pub fn sqr(&self) -> BigReal {
        self * self
    }

    pub fn recip(&self) -> BigReal {
        let one = BigReal::exact(Float::with_val(self.prec(), 1));
        &one / self
    }

    pub fn pow_u(&self, n: u32) -> BigReal {
        let mut acc = BigReal::exact(Float::with_val(self.prec(), 1));
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn mul_rational(&self, q: &Rational) -> BigReal {
        let c = BigReal::from_rational(q, self.prec());
        self * &c
    }

    /// Natural log; the radius becomes infinite unless the enclosure is positive.
    pub fn ln(&self) -> BigReal {
        let v = Float::with_val(self.prec(), self.value.ln_ref());
        let lo = Float::with_val(RADIUS_PREC, &self.value - &self.radius);
        let r = if lo <= 0 {
            Float::with_val(RADIUS_PREC, rug::float::Special::Infinity)
        } else {
            // |ln x - ln y| <= r / (x - r)
            let e = Float::with_val(RADIUS_PREC, &self.radius / &lo) * 1.000001f64;
            combine_radius(&[&e], &v)
        };
        BigReal { value: v, radius: r }
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        format_decimal(&self.value, digits)
    }

    pub fn radius_string(&self) -> String {
        format_decimal(&self.radius, 3)
    }
}

fn combine_radius(parts: &[&Float], result: &Float) -> Float {
    let mut r = Float::with_val(RADIUS_PREC, 0);
    for p in parts {
        r.add_assign_round(*p, Round::Up);
    }
    r.add_assign_round(ulp(result), Round::Up);
    r
}

impl<'a> Add<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn add(self, rhs: &BigReal) -> BigReal {
        let p = self.prec().max(rhs.prec());
        let v = Float::with_val(p, &self.value + &rhs.value);
        let r = combine_radius(&[&self.radius, &rhs.radius], &v);
        BigReal {
            value: v,
            radius: r,
        }
    }
}

impl<'a> Sub<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn sub(self, rhs: &BigReal) -> BigReal {
        let p = self.prec().max(rhs.prec());
        let v = Float::with_val(p, &self.value - &rhs.value);
        let r = combine_radius(&[&self.radius, &rhs.radius], &v);
        BigReal {
            value: v,
            radius: r,
        }
    }
}

impl<'a> Mul<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn mul(self, rhs: &BigReal) -> BigReal {
        let p = self.prec().max(rhs.prec());
        let v = Float::with_val(p, &self.value * &rhs.value);
        let a = Float::with_val(RADIUS_PREC, self.value.abs_ref());
        let b = Float::with_val(RADIUS_PREC, rhs.value.abs_ref());
        let t1 = Float::with_val(RADIUS_PREC, &a * &rhs.radius);
        let t2 = Float::with_val(RADIUS_PREC, &b * &self.radius);
        let t3 = Float::with_val(RADIUS_PREC, &self.radius * &rhs.radius);
        let r = combine_radius(&[&t1, &t2, &t3], &v);
        BigReal {
            value: v,
            radius: r,
        }
    }
}

impl<'a> Div<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        let p = self.prec().max(rhs.prec());
        let v = Float::with_val(p, &self.value / &rhs.value);
        // |a/b - a'/b'| <= (ra + |a/b| rb) / (|b| - rb)
        let b = Float::with_val(RADIUS_PREC, rhs.value.abs_ref());
        let denom = Float::with_val(RADIUS_PREC, &b - &rhs.radius);
        let r = if denom <= 0 {
            Float::with_val(RADIUS_PREC, rug::float::Special::Infinity)
        } else {
            let q = Float::with_val(RADIUS_PREC, v.abs_ref());
            let num = Float::with_val(RADIUS_PREC, &q * &rhs.radius) + &self.radius;
            let e = Float::with_val(RADIUS_PREC, &num / &denom) * 1.000001f64;
            combine_radius(&[&e], &v)
        };
        BigReal {
            value: v,
            radius: r,
        }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            value: Float::with_val(self.prec(), -&self.value),
            radius: self.radius.clone(),
        }
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.correct_digits().max(1) as usize).min(digits_for_bits(self.prec()) as usize);
        write!(f, "{} +/- {}", self.to_decimal(digits), self.radius_string())
    }
}

/// Decimal rendering with `digits` significant digits, positional for moderate
/// exponents and scientific otherwise.
pub fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let (neg, mantissa, exp) = decimal_parts(x, digits);
    // value = 0.mantissa * 10^exp
    let sign = if neg { "-" } else { "" };
    let sci_exp = exp - 1;
    if (-6..=24).contains(&sci_exp) {
        let s = if exp <= 0 {
            format!("0.{}{}", "0".repeat((-exp) as usize), mantissa)
        } else if (exp as usize) >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(exp as usize - mantissa.len()))
        } else {
            format!("{}.{}", &mantissa[..exp as usize], &mantissa[exp as usize..])
        };
        format!("{sign}{s}")
    } else {
        let (h, t) = mantissa.split_at(1);
        if t.is_empty() {
            format!("{sign}{h}e{sci_exp}")
        } else {
            format!("{sign}{h}.{t}e{sci_exp}")
        }
    }
}

/// Sign, digit string and exponent with value = 0.digits * 10^exp.
fn decimal_parts(x: &Float, digits: usize) -> (bool, String, i64) {
    let (neg, mant, exp) = x.to_sign_string_exp(10, Some(digits));
    (neg, mant, exp.unwrap_or(0) as i64)
}

/// Parse a decimal string at the given precision.
pub fn parse_decimal(s: &str, prec: u32) -> Option<Float> {
    Float::parse(s.trim()).ok().map(|p| Float::with_val(prec, p))
}
