//! Nested moments `int_0^inf f(u) int_0^u g(x) dx du` by double-exponential
//! Sinc indefinite integration on a common grid.
//!
//! With `u = exp(t - exp(-t))` both the inner antiderivative at every grid
//! point and the outer trapezoidal sum come from one set of Bessel values:
//! `G(t_j) ~ h sum_k sigma_{j-k} F_g(t_k)`.

use rug::{Assign, Float, Rational};
use std::collections::BTreeMap;

use super::{moment, sinc, working_bits, BesselProduct, QuadOptions, QuadratureResult};
use crate::error::{Error, Result};
use crate::real::{format_decimal, Precision};
use crate::specfun::bessel;

const H0_LOG2: i32 = 1;
const T_SPAN: f64 = 10.0;
const GRID_STEP: f64 = 1.0 / 32.0;
/// Levels are indexed on a common integer lattice of spacing `2^-LATTICE`.
const LATTICE: i32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    /// inner integral over (0, u)
    Lower,
    /// inner integral over (u, inf)
    Upper,
}

/// `int_0^inf f(u) (int_0^u g(x) dx) du`.
pub fn nested_moment(f: &BesselProduct, g: &BesselProduct, prec: &Precision) -> Result<QuadratureResult> {
    check_lower(f, g)?;
    sinc_nested(f, g, Direction::Lower, prec, &QuadOptions::default())
}

/// `int_0^inf f(u) (int_u^inf g(x) dx) du`. When `g` is not integrable at 0
/// the order of integration is exchanged, which turns the integral into
/// `int_0^inf g(x) (int_0^x f(u) du) dx`.
pub fn nested_moment_upper(f: &BesselProduct, g: &BesselProduct, prec: &Precision) -> Result<QuadratureResult> {
    if g.order_at_zero() > -1 {
        check_upper(f, g)?;
        sinc_nested(f, g, Direction::Upper, prec, &QuadOptions::default())
    } else {
        check_lower(g, f)?;
        sinc_nested(g, f, Direction::Lower, prec, &QuadOptions::default())
    }
}

fn check_lower(f: &BesselProduct, g: &BesselProduct) -> Result<()> {
    if g.order_at_zero() <= -1 {
        return Err(Error::Divergent {
            endpoint: "0".into(),
            reason: format!("inner integral of {g} diverges at 0"),
        });
    }
    if g.decay_rate() <= 0 {
        return Err(Error::Divergent {
            endpoint: "infinity".into(),
            reason: format!("inner integrand {g} does not decay"),
        });
    }
    if f.order_at_zero() + g.order_at_zero() < -1 {
        return Err(Error::Divergent {
            endpoint: "0".into(),
            reason: format!("outer integrand {f} times the inner integral of {g} is not integrable at 0"),
        });
    }
    if f.decay_rate() <= 0 {
        return Err(Error::Divergent {
            endpoint: "infinity".into(),
            reason: format!("outer integrand {f} does not decay"),
        });
    }
    Ok(())
}

fn check_upper(f: &BesselProduct, g: &BesselProduct) -> Result<()> {
    g.check_integrable().map_err(|e| match e {
        Error::Divergent { endpoint, reason } => Error::Divergent {
            endpoint,
            reason: format!("inner integral: {reason}"),
        },
        other => other,
    })?;
    if f.order_at_zero() <= -1 {
        return Err(Error::Divergent {
            endpoint: "0".into(),
            reason: format!("outer integrand {f} is not integrable at 0"),
        });
    }
    if f.decay_rate() + g.decay_rate() <= 0 {
        return Err(Error::Divergent {
            endpoint: "infinity".into(),
            reason: format!("{f} times the tail integral of {g} does not decay"),
        });
    }
    Ok(())
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln u` and `ln du/dt` for the map `u = exp(t - exp(-t))`.
fn ln_map(t: f64) -> (f64, f64) {
    let ln_u = t - (-t).exp();
    (ln_u, ln_u + (1.0 + (-t).exp()).ln())
}

/// Parameter range outside which both the inner integrand and the outer
/// contribution are negligible, from cheap magnitude estimates. Returns
/// `(t_lo, t_hi, ln of the estimated result)`.
fn relevant_range(f: &BesselProduct, g: &BesselProduct, dir: Direction, ln_tol: f64) -> (f64, f64, f64) {
    let n = (2.0 * T_SPAN / GRID_STEP) as usize + 1;
    let ts: Vec<f64> = (0..n).map(|i| -T_SPAN + i as f64 * GRID_STEP).collect();
    let mut lf = Vec::with_capacity(n);
    let mut lg = Vec::with_capacity(n);
    for &t in &ts {
        let (lu, lw) = ln_map(t);
        lf.push(f.ln_estimate(lu) + lw);
        lg.push(g.ln_estimate(lu) + lw);
    }
    let lh = GRID_STEP.ln();
    let mut lcum = vec![f64::NEG_INFINITY; n];
    let mut acc = f64::NEG_INFINITY;
    let order: Vec<usize> = match dir {
        Direction::Lower => (0..n).collect(),
        Direction::Upper => (0..n).rev().collect(),
    };
    for &i in &order {
        acc = log_add(acc, lg[i] + lh);
        lcum[i] = acc;
    }
    let mut total = f64::NEG_INFINITY;
    for i in 0..n {
        total = log_add(total, lf[i] + lcum[i] + lh);
    }
    let ln_thr = ln_tol + total.max(0.0) - 30.0;
    let relevant = |i: usize| lg[i] > ln_thr || lf[i] + lcum[i] > ln_thr;
    let lo = (0..n).find(|&i| relevant(i)).unwrap_or(0);
    let hi = (0..n).rev().find(|&i| relevant(i)).unwrap_or(n - 1);
    let snap = |t: f64, up: bool| {
        let s = t * 2f64.powi(H0_LOG2);
        let s = if up { s.ceil() } else { s.floor() };
        s / 2f64.powi(H0_LOG2)
    };
    (snap(ts[lo] - 0.5, false), snap(ts[hi] + 0.5, true), total)
}

struct NodeValues {
    ff: Float,
    fg: Float,
}

fn eval_node(f: &BesselProduct, g: &BesselProduct, t: &Float, wp: u32) -> NodeValues {
    let emt = Float::with_val(wp, Float::with_val(wp, -t).exp_ref());
    let u = Float::with_val(wp, Float::with_val(wp, t - &emt).exp_ref());
    let w = Float::with_val(wp, &u * Float::with_val(wp, &emt + 1u32));
    let s = bessel::bessel_set(&u, wp, f.needs_i() || g.needs_i());
    let mut ff = f.eval(&u, &s, wp);
    ff *= &w;
    let mut fg = g.eval(&u, &s, wp);
    fg *= &w;
    NodeValues { ff, fg }
}

fn sinc_nested(
    f: &BesselProduct,
    g: &BesselProduct,
    dir: Direction,
    prec: &Precision,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let wp = working_bits(prec) + 24;
    let tol = prec.tolerance();
    let ln_tol = tol.to_f64().ln();
    let (t_lo, t_hi, _) = relevant_range(f, g, dir, ln_tol);
    let mut cache: BTreeMap<i64, NodeValues> = BTreeMap::new();
    let mut prev: Option<Float> = None;
    let mut t = Float::new(wp);
    for level in 0..=opts.max_levels {
        let log2_h = -(H0_LOG2 + level as i32);
        let h = Float::with_val(wp, 1) << log2_h;
        let k_lo = (t_lo * 2f64.powi(-log2_h)).floor() as i64;
        let k_hi = (t_hi * 2f64.powi(-log2_h)).ceil() as i64;
        let stride = 1i64 << (LATTICE + log2_h);
        for k in k_lo..=k_hi {
            let key = k * stride;
            cache.entry(key).or_insert_with(|| {
                t.assign(k);
                t <<= log2_h;
                eval_node(f, g, &t, wp)
            });
        }
        let vals: Vec<&NodeValues> = (k_lo..=k_hi).map(|k| &cache[&(k * stride)]).collect();
        let n = vals.len();
        let sigma = sinc::sigma_table(n, wp);
        let one = Float::with_val(wp, 1);
        // s(m) = sigma_m for m >= 0 and 1 - sigma_{-m} for m < 0
        let weight = |m: i64| -> Float {
            if m >= 0 {
                sigma[m as usize].clone()
            } else {
                Float::with_val(wp, &one - &sigma[(-m) as usize])
            }
        };
        let weights: Vec<Float> = (-(n as i64)..=(n as i64)).map(weight).collect();
        let mut total = Float::with_val(wp, 0);
        let mut g_acc = Float::new(wp);
        let mut prod = Float::new(wp);
        for (j, vj) in vals.iter().enumerate() {
            if vj.ff.is_zero() {
                continue;
            }
            g_acc.assign(0);
            for (k, vk) in vals.iter().enumerate() {
                let m = match dir {
                    Direction::Lower => j as i64 - k as i64,
                    Direction::Upper => k as i64 - j as i64,
                };
                prod.assign(&weights[(m + n as i64) as usize] * &vk.fg);
                g_acc += &prod;
            }
            prod.assign(&g_acc * &vj.ff);
            total += &prod;
        }
        total *= &h;
        total *= &h;
        if let Some(p) = prev.as_ref() {
            let diff = Float::with_val(64, Float::with_val(wp, &total - p).abs_ref());
            let bound = Float::with_val(64, total.abs_ref()).max(&Float::with_val(64, 1)) * &tol;
            if level >= opts.min_levels && diff <= bound {
                return Ok(QuadratureResult::new(
                    Float::with_val(working_bits(prec), &total),
                    diff,
                    level,
                    cache.len(),
                ));
            }
            if level == opts.max_levels {
                return Err(Error::NonConvergence {
                    value: format_decimal(&total, 20),
                    error: format_decimal(&diff, 3),
                    levels: level,
                });
            }
        }
        prev = Some(total);
    }
    unreachable!("loop returns at max_levels")
}

fn combine(terms: &[(Rational, QuadratureResult)]) -> QuadratureResult {
    let bits = terms[0].1.value.prec();
    let mut v = Float::with_val(bits, 0);
    let mut e = Float::with_val(64, 0);
    let mut levels = 0;
    let mut nodes = 0;
    for (c, r) in terms {
        let s = r.scale(c);
        v += s.value.value();
        e += &s.error_estimate;
        levels = levels.max(r.levels_used);
        nodes += r.nodes;
    }
    QuadratureResult::new(v, e, levels, nodes)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// `x^n K0^2 K1^2`.
pub fn f_family(n: u32) -> BesselProduct {
    BesselProduct::new(n, 2, 2, 0, 0)
}

/// `x^n K0^2 K1 I1`.
pub fn g_family(n: u32) -> BesselProduct {
    BesselProduct::new(n, 2, 1, 0, 1)
}

/// The three-term combination with one lower and two upper nested integrals:
/// `8 Z(u^3 K0^2 K1^2, x K0^2 K1 I1)
///  - 4 [Z+(u^3 K0 K1^2 I0, x K0^2 K1^2) - Z+(u^3 K0^2 K1 I1, x K0^2 K1^2)]
///  + int u^3 K0^4 K1^2`.
pub fn i_rho2_alpha6(prec: &Precision) -> Result<QuadratureResult> {
    let p = prec.with_extra(2);
    let t1 = nested_moment(&f_family(3), &g_family(1), &p)?;
    let inner = f_family(1);
    let t2a = nested_moment_upper(&BesselProduct::new(3, 1, 2, 1, 0), &inner, &p)?;
    let t2b = nested_moment_upper(&BesselProduct::new(3, 2, 1, 0, 1), &inner, &p)?;
    let t3 = moment(&BesselProduct::new(3, 4, 2, 0, 0), &p)?;
    Ok(combine(&[
        (q(8, 1), t1),
        (q(-4, 1), t2a),
        (q(4, 1), t2b),
        (q(1, 1), t3),
    ]))
}

/// Same quantity after the Wronskian rewrite: only lower nested integrals,
/// `8 Z(f3, g1) + 8 Z(f1, g3) - 4 Z(f1, x^2 K0 K1) + int u^3 K0^4 K1^2`.
pub fn i_rho2_alpha6_wronskian_form(prec: &Precision) -> Result<QuadratureResult> {
    let p = prec.with_extra(2);
    let a = nested_moment(&f_family(3), &g_family(1), &p)?;
    let b = nested_moment(&f_family(1), &g_family(3), &p)?;
    let c = nested_moment(&f_family(1), &BesselProduct::new(2, 1, 1, 0, 0), &p)?;
    let d = moment(&BesselProduct::new(3, 4, 2, 0, 0), &p)?;
    Ok(combine(&[(q(8, 1), a), (q(8, 1), b), (q(-4, 1), c), (q(1, 1), d)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_is_diagnosed() {
        let p = Precision::digits(15);
        // inner x^0 K1^1 ~ 1/x
        let e = nested_moment(&f_family(3), &BesselProduct::new(0, 0, 1, 0, 0), &p);
        assert!(matches!(e, Err(Error::Divergent { .. })));
        // outer 1/u^3 type singularity
        let e = nested_moment(&BesselProduct::new(0, 0, 3, 0, 0), &g_family(1), &p);
        assert!(matches!(e, Err(Error::Divergent { .. })));
    }

    #[test]
    fn shuffle_against_moments() {
        let p = Precision::digits(30);
        let f = BesselProduct::k0_power(1, 4);
        let g = f_family(2);
        let fg = nested_moment(&f, &g, &p).unwrap();
        let gf = nested_moment(&g, &f, &p).unwrap();
        let mf = moment(&f, &p).unwrap();
        let mg = moment(&g, &p).unwrap();
        let lhs = &fg.value + &gf.value;
        let rhs = &mf.value * &mg.value;
        let d = Float::with_val(200, lhs.value() - rhs.value()).abs();
        assert!(d < 1e-28, "{d}");
    }
}
