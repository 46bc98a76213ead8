//! Modified Bessel functions K0, K1, I0, I1 of real positive argument.

use rug::float::Constant;
use rug::{Assign, Float};
use std::f64::consts::LOG2_E;

use crate::real::digits_for_bits;

/// Values at one abscissa, each with relative accuracy about `2^-bits`.
#[derive(Clone, Debug)]
pub struct BesselSet {
    pub k0: Float,
    pub k1: Float,
    pub i0: Option<Float>,
    pub i1: Option<Float>,
}

/// Crossover abscissa above which the asymptotic expansion of K is tried first.
pub fn crossover(bits: u32) -> f64 {
    (0.7 * digits_for_bits(bits) as f64).max(25.0)
}

/// K0, K1 and optionally I0, I1 at `x > 0`.
pub fn bessel_set(x: &Float, bits: u32, need_i: bool) -> BesselSet {
    let xf = x.to_f64();
    if xf > crossover(bits) {
        if let Some((k0, k1)) = asymptotic_k(x, bits) {
            let (i0, i1) = if need_i {
                let s = series(x, bits, false);
                (Some(s.i0), Some(s.i1))
            } else {
                (None, None)
            };
            return BesselSet { k0, k1, i0, i1 };
        }
    }
    let s = series(x, bits, true);
    BesselSet {
        k0: s.k0.expect("series computes K"),
        k1: s.k1.expect("series computes K"),
        i0: Some(s.i0),
        i1: Some(s.i1),
    }
}

/// I0 and I1 only.
pub fn bessel_i_pair(x: &Float, bits: u32) -> (Float, Float) {
    let s = series(x, bits, false);
    (s.i0, s.i1)
}

pub(crate) struct Series {
    pub i0: Float,
    pub i1: Float,
    pub k0: Option<Float>,
    pub k1: Option<Float>,
}

/// Ascending series. For K the logarithmic series is used at a working
/// precision raised by `2x log2(e)` bits, which keeps the relative error of the
/// exponentially small result near `2^-bits`.
pub(crate) fn series(x: &Float, bits: u32, need_k: bool) -> Series {
    let xf = x.to_f64();
    let mut wp = bits + 24 + (xf.max(1.0).log2() as u32);
    if need_k {
        wp += (2.0 * xf * LOG2_E).ceil() as u32;
    }
    let x = Float::with_val(wp, x);
    let t = Float::with_val(wp, x.square_ref()) / 4u32;
    let eps = {
        let mut e = Float::with_val(wp, 1);
        e >>= wp as i32;
        e
    };

    let mut term = Float::with_val(wp, 1);
    let mut term1 = Float::with_val(wp, 1);
    let mut s_i0 = Float::with_val(wp, 1);
    let mut s_i1 = Float::with_val(wp, 1);
    let mut h = Float::with_val(wp, 0);
    let mut h_next = Float::with_val(wp, 1);
    let mut s_k0 = Float::with_val(wp, 0);
    let mut s_k1 = Float::with_val(wp, 1);
    let tf = t.to_f64();
    let mut k: u32 = 0;
    let mut scratch = Float::new(wp);
    loop {
        k += 1;
        term *= &t;
        term /= k;
        term /= k;
        term1.assign(&term);
        term1 /= k + 1;
        s_i0 += &term;
        s_i1 += &term1;
        if need_k {
            h.assign(&h_next);
            h_next += Float::with_val(wp, 1) / (k + 1);
            scratch.assign(&h);
            scratch *= &term;
            s_k0 += &scratch;
            scratch.assign(&h);
            scratch += &h_next;
            scratch *= &term1;
            s_k1 += &scratch;
        }
        if (k as f64) * (k as f64) > tf {
            let mut bound = Float::with_val(32, &term);
            bound *= 2 * (k + 2);
            if bound < Float::with_val(wp, &eps * &s_i0) {
                break;
            }
        }
    }

    let half_x = Float::with_val(wp, &x / 2u32);
    let i1 = Float::with_val(wp, &half_x * &s_i1);
    let (k0, k1) = if need_k {
        let gamma = super::euler_gamma(wp);
        let l = Float::with_val(wp, half_x.ln_ref()) + &gamma;
        let k0 = Float::with_val(wp, &s_k0 - Float::with_val(wp, &l * &s_i0));
        let quarter = Float::with_val(wp, &x / 4u32);
        let mut k1 = Float::with_val(wp, x.recip_ref());
        k1 += Float::with_val(wp, &l * &i1);
        k1 -= Float::with_val(wp, &quarter * &s_k1);
        (
            Some(Float::with_val(bits, k0)),
            Some(Float::with_val(bits, k1)),
        )
    } else {
        (None, None)
    };
    Series {
        i0: Float::with_val(bits, s_i0),
        i1: Float::with_val(bits, i1),
        k0,
        k1,
    }
}

/// Asymptotic expansion of K0 and K1; `None` when the smallest term of the
/// divergent series does not reach the requested accuracy.
pub(crate) fn asymptotic_k(x: &Float, bits: u32) -> Option<(Float, Float)> {
    let wp = bits + 24;
    let x = Float::with_val(wp, x);
    let xf = x.to_f64();
    let mut eps = Float::with_val(wp, 1);
    eps >>= (bits + 8) as i32;
    let eight_x = Float::with_val(wp, &x * 8u32);
    let mut t0 = Float::with_val(wp, 1);
    let mut t1 = Float::with_val(wp, 1);
    let mut s0 = Float::with_val(wp, 1);
    let mut s1 = Float::with_val(wp, 1);
    let mut done0 = false;
    let mut done1 = false;
    let mut k: i64 = 0;
    while !(done0 && done1) {
        k += 1;
        if (k as f64) > 2.0 * xf {
            return None;
        }
        let odd = (2 * k - 1) * (2 * k - 1);
        if !done0 {
            t0 *= -odd;
            t0 /= k;
            t0 /= &eight_x;
            if Float::with_val(32, t0.abs_ref()) < eps {
                done0 = true;
            } else {
                s0 += &t0;
            }
        }
        if !done1 {
            t1 *= 4 - odd;
            t1 /= k;
            t1 /= &eight_x;
            if Float::with_val(32, t1.abs_ref()) < eps {
                done1 = true;
            } else {
                s1 += &t1;
            }
        }
    }
    let pi = Float::with_val(wp, Constant::Pi);
    let mut pref = Float::with_val(wp, &pi / &x);
    pref /= 2u32;
    pref.sqrt_mut();
    pref *= Float::with_val(wp, -&x).exp();
    s0 *= &pref;
    s1 *= &pref;
    Some((Float::with_val(bits, s0), Float::with_val(bits, s1)))
}

/// Cheap natural-log magnitude estimates used only to skip quadrature nodes
/// whose contribution is far below tolerance.
pub(crate) fn ln_k0_estimate(lnx: f64) -> f64 {
    let x = lnx.exp();
    if x < 1e-3 {
        (-lnx + std::f64::consts::LN_2 - 0.5772156649).max(1e-300).ln()
    } else if x < 2.0 {
        ln_k_mid(0, x)
    } else {
        -x + 0.5 * (std::f64::consts::PI / (2.0 * x)).ln()
    }
}

pub(crate) fn ln_k1_estimate(lnx: f64) -> f64 {
    let x = lnx.exp();
    if x < 1e-3 {
        -lnx
    } else if x < 2.0 {
        ln_k_mid(1, x)
    } else {
        -x + 0.5 * (std::f64::consts::PI / (2.0 * x)).ln() + (1.0 + 3.0 / (8.0 * x)).ln()
    }
}

pub(crate) fn ln_i0_estimate(lnx: f64) -> f64 {
    let x = lnx.exp();
    if x < 20.0 {
        (1.0 + x * x / 4.0 + x.powi(4) / 64.0).ln().min(x)
    } else {
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln()
    }
}

pub(crate) fn ln_i1_estimate(lnx: f64) -> f64 {
    let x = lnx.exp();
    if x < 1e-3 {
        lnx - std::f64::consts::LN_2
    } else if x < 20.0 {
        (x / 2.0 * (1.0 + x * x / 8.0 + x.powi(4) / 192.0)).ln().min(x)
    } else {
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln()
    }
}

#[allow(dead_code)]
fn ln_k_mid(nu: u32, x: f64) -> f64 {
    let f = Float::with_val(64, x);
    let s = series(&f, 53, true);
    let v = if nu == 0 { s.k0 } else { s.k1 };
    v.map(|v| v.to_f64().ln()).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, p: u32) -> Float {
        Float::with_val(p, Float::parse(s).unwrap())
    }

    #[test]
    fn small_argument_values() {
        let p = 200;
        let one = Float::with_val(p, 1);
        let s = bessel_set(&one, p, true);
        let k0 = parse("0.42102443824070833333562737921260903613621974822666", p);
        let k1 = parse("0.60190723019723457473754000153561733926158688996810", p);
        assert!(Float::with_val(p, &s.k0 - &k0).abs() < 1e-45);
        assert!(Float::with_val(p, &s.k1 - &k1).abs() < 1e-45);
    }

    #[test]
    fn branches_agree_near_crossover() {
        let bits = 120;
        for xv in [50.0, 60.0, 70.0] {
            let x = Float::with_val(bits, xv);
            let a = asymptotic_k(&x, bits).expect("reachable");
            let s = series(&x, bits, true);
            let rel0 = Float::with_val(bits, &a.0 - s.k0.as_ref().unwrap()) / &a.0;
            let rel1 = Float::with_val(bits, &a.1 - s.k1.as_ref().unwrap()) / &a.1;
            assert!(rel0.abs() < 1e-33, "x={xv}");
            assert!(rel1.abs() < 1e-33, "x={xv}");
        }
    }

    #[test]
    fn asymptotic_refuses_when_unreachable() {
        let x = Float::with_val(400, 10);
        assert!(asymptotic_k(&x, 400).is_none());
    }

    #[test]
    fn magnitude_estimates_are_rough_but_sane() {
        for xv in [1e-6f64, 0.1, 1.0, 3.0, 30.0] {
            let x = Float::with_val(80, xv);
            let s = bessel_set(&x, 60, true);
            let l = xv.ln();
            assert!((ln_k0_estimate(l) - s.k0.to_f64().ln()).abs() < 1.0, "{xv}");
            assert!((ln_k1_estimate(l) - s.k1.to_f64().ln()).abs() < 1.0, "{xv}");
            assert!((ln_i0_estimate(l) - s.i0.unwrap().to_f64().ln()).abs() < 2.0, "{xv}");
            assert!((ln_i1_estimate(l) - s.i1.unwrap().to_f64().ln()).abs() < 2.0, "{xv}");
        }
    }
}
