//! Decimal rendering and named constants.

use rug::{Float, Integer, Rational};
use zetalab::real::{bits_for_digits, digits_for_bits, format_decimal, parse_decimal};
use zetalab::specfun::{digamma_at_one, trigamma_third_difference, zeta};
use zetalab::{BigReal, Error, Precision, Result};

/// Every digit the value carries, for the cache.
pub fn full(x: &BigReal) -> String {
    format_decimal(x.value(), digits_for_bits(x.prec()) as usize + 2)
}

pub fn parse(s: &str, digits: u32) -> Result<Float> {
    parse_decimal(s, bits_for_digits(digits + 20))
        .ok_or_else(|| Error::Evaluation(format!("malformed decimal {s}")))
}

/// `s` rounded to `digits` significant digits.
pub fn round(s: &str, digits: u32) -> Result<String> {
    Ok(format_decimal(&parse(s, digits)?, digits as usize))
}

/// `-log10 |x|`, or `cap` when `x` is zero.
pub fn neg_log10(x: &Float, cap: u32) -> f64 {
    if x.is_zero() {
        return f64::from(cap);
    }
    -Float::with_val(64, x.abs_ref()).log10().to_f64()
}

/// Upper bound `<1e-k` on a nonnegative quantity, with `k` capped at
/// `digits - 2` so the string does not depend on digits beyond the request.
pub fn bound(x: &Float, digits: u32) -> String {
    let cap = digits.saturating_sub(2);
    let k = neg_log10(x, cap).floor().min(f64::from(cap)) as i64;
    if k >= 0 {
        format!("<1e-{k}")
    } else {
        format!("<1e{}", -k)
    }
}

/// Agreeing significant digits of `a` and `b`, capped at `digits`.
pub fn agreeing_digits(a: &Float, b: &Float, digits: u32) -> u32 {
    let prec = a.prec().max(b.prec());
    let d = Float::with_val(prec, a - b);
    let rel = if b.is_zero() { d } else { Float::with_val(prec, &d / b) };
    neg_log10(&rel, digits).floor().clamp(0.0, f64::from(digits)) as u32
}

/// A named constant, or `None` for an unknown name.
pub fn named(name: &str, prec: &Precision) -> Result<Option<BigReal>> {
    let bits = prec.bits();
    Ok(Some(match name.to_ascii_lowercase().as_str() {
        "1" | "one" => BigReal::exact(Float::with_val(bits, 1)),
        "pi" => BigReal::rounded(Float::with_val(bits, rug::float::Constant::Pi)),
        "log2" => BigReal::rounded(Float::with_val(bits, rug::float::Constant::Log2)),
        "gamma" | "euler" => &BigReal::exact(Float::with_val(bits, 0)) - &digamma_at_one(prec),
        "psi1diff" => trigamma_third_difference(prec),
        s => match s.strip_prefix("zeta").and_then(|k| k.parse::<u32>().ok()) {
            Some(k) if k >= 2 => zeta(k, prec)?,
            _ => return Ok(None),
        },
    }))
}

/// A decimal literal with a radius of half a unit in its last digit, or a
/// named constant.
pub fn value_arg(s: &str, prec: &Precision) -> Result<BigReal> {
    if let Some(v) = named(s, prec)? {
        return Ok(v);
    }
    let x = parse_decimal(s, prec.bits())
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::InvalidArgument(format!("not a number or known constant: {s}")))?;
    let t = s.trim().trim_start_matches(['+', '-']);
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (t, 0),
    };
    let frac = mant.find('.').map_or(0, |i| mant.len() - i - 1) as i64;
    let r = Float::with_val(64, zetalab::real::pow10(exp - frac, 64)) / 2u32;
    Ok(BigReal::new(x, r))
}

pub fn integer_arg(s: &str) -> Result<Integer> {
    s.parse::<Integer>()
        .map_err(|_| Error::InvalidArgument(format!("not an integer: {s}")))
}

/// `q * atom` with `q` rendered as in `7/8*zeta(3)`.
pub fn term(q: &Rational, atom: &str) -> String {
    if atom == "1" {
        q.to_string()
    } else if *q == 1 {
        atom.to_string()
    } else {
        format!("{q}*{atom}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_capped() {
        let p = 200;
        assert_eq!(bound(&Float::with_val(p, 3e-70), 60), "<1e-58");
        assert_eq!(bound(&Float::with_val(p, 3e-20), 60), "<1e-19");
        assert_eq!(bound(&Float::with_val(p, 0), 30), "<1e-28");
        assert_eq!(bound(&Float::with_val(p, 250), 30), "<1e3");
    }

    #[test]
    fn literal_radius() {
        let prec = Precision::digits(30);
        let v = value_arg("1.250", &prec).unwrap();
        assert_eq!(v.radius().to_f64(), 5e-4);
        let v = value_arg("-2.5e-3", &prec).unwrap();
        assert_eq!(v.to_f64(), -2.5e-3);
        assert!((v.radius().to_f64() - 5e-5).abs() < 1e-18);
        assert!(value_arg("zeta3", &prec).unwrap().to_f64() > 1.2);
        assert!(value_arg("zeta", &prec).is_err());
    }

    #[test]
    fn terms() {
        assert_eq!(term(&Rational::from((7, 8)), "zeta(3)"), "7/8*zeta(3)");
        assert_eq!(term(&Rational::from((-1, 2)), "1"), "-1/2");
        assert_eq!(term(&Rational::from(1), "pi"), "pi");
    }
}
