//! Double-exponential quadrature on (0,1) and [a,inf) with level doubling.

use rug::float::Constant;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::real::format_decimal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Panel {
    /// tanh-sinh on (0,1): `u = (1 + tanh s)/2`, `s = (pi/2) sinh t`.
    Unit,
    /// `u = a + exp(t - exp(-t))` on `[a, inf)`.
    Tail,
}

/// A quadrature abscissa with its complement (`1 - u` on the unit panel,
/// `u - a` on the tail panel) carried separately for endpoint accuracy.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub u: Float,
    #[cfg_attr(not(test), allow(dead_code))]
    pub comp: Float,
}

pub(crate) struct DeOutcome {
    pub value: Float,
    pub error: Float,
    pub levels: u32,
    pub nodes: usize,
}

const H0_LOG2: i32 = 1;
const T_MAX: f64 = 12.0;

/// Abscissa and weight `du/dt` at parameter `t`.
pub(crate) fn node(panel: Panel, t: &Float, base: &Float, wp: u32) -> (Node, Float) {
    match panel {
        Panel::Unit => {
            let pi = Float::with_val(wp, Constant::Pi);
            let mut s = Float::with_val(wp, t.sinh_ref());
            s *= &pi;
            s /= 2u32;
            // e = exp(2s); u = e/(1+e); 1-u = 1/(1+e)
            let e = Float::with_val(wp, Float::with_val(wp, &s * 2u32).exp_ref());
            let one_pe = Float::with_val(wp, &e + 1u32);
            let comp = Float::with_val(wp, one_pe.recip_ref());
            let u = Float::with_val(wp, &e * &comp);
            let mut w = Float::with_val(wp, t.cosh_ref());
            w *= &pi;
            w *= &u;
            w *= &comp;
            (Node { u, comp }, w)
        }
        Panel::Tail => {
            let emt = Float::with_val(wp, Float::with_val(wp, -t).exp_ref());
            let comp = Float::with_val(wp, Float::with_val(wp, t - &emt).exp_ref());
            let u = Float::with_val(wp, &comp + base);
            let w = Float::with_val(wp, &comp * Float::with_val(wp, &emt + 1u32));
            (Node { u, comp }, w)
        }
    }
}

/// Integrate `f` over the panel. The closure receives the node, its weight and
/// the natural log of the current negligibility threshold, and returns the
/// weighted value `w f(u)` or `None` if it can show the value is negligible.
pub(crate) fn integrate<F>(
    panel: Panel,
    base: &Float,
    wp: u32,
    tol: &Float,
    min_levels: u32,
    max_levels: u32,
    mut f: F,
) -> Result<DeOutcome>
where
    F: FnMut(&Node, &Float, f64) -> Result<Option<Float>>,
{
    let mut raw = Float::with_val(wp, 0);
    let mut nodes = 0usize;
    let mut prev: Option<Float> = None;
    let mut t = Float::new(wp);
    let mut scratch = Float::new(wp);
    // how far each direction was walked so far; finer levels never stop short
    // of it, so a peak far from t = 0 is not cut off by small values near 0
    let mut extent = [0f64; 2];
    for level in 0..=max_levels {
        let log2_h = -(H0_LOG2 + level as i32);
        let h = Float::with_val(wp, 1) << log2_h;
        // level 0 uses every multiple of h, later levels only the odd ones
        let (start, step) = if level == 0 { (0i64, 1i64) } else { (1, 2) };
        let mut level_sum = Float::with_val(wp, 0);
        let extent_prev = extent;
        for (side, dir) in [1i64, -1].into_iter().enumerate() {
            let mut k = if dir == 1 { start } else { -1 };
            let mut quiet = 0;
            loop {
                t.assign(k);
                t <<= log2_h;
                let at = t.to_f64().abs();
                if at > T_MAX {
                    break;
                }
                extent[side] = extent[side].max(at);
                let (nd, w) = node(panel, &t, base, wp);
                let scale = Float::with_val(64, raw.abs_ref()) * Float::with_val(64, &h) + 1e-300f64;
                let thr = Float::with_val(64, tol * scale.max(&Float::with_val(64, 1)));
                let ln_thr = thr.to_f64().ln() - 12.0;
                let val = f(&nd, &w, ln_thr)?;
                nodes += 1;
                let negligible = match val {
                    None => true,
                    Some(v) => {
                        scratch.assign(v.abs_ref());
                        scratch *= &h;
                        let small = scratch.to_f64().ln() < ln_thr;
                        level_sum += &v;
                        small
                    }
                };
                if negligible {
                    quiet += 1;
                    if quiet >= 3 && at >= extent_prev[side] {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                k += dir * step;
            }
        }
        raw += &level_sum;
        let s = Float::with_val(wp, &raw * &h);
        if let Some(p) = prev.as_ref() {
            let diff = Float::with_val(64, Float::with_val(wp, &s - p).abs_ref());
            let bound = Float::with_val(64, s.abs_ref()).max(&Float::with_val(64, 1)) * tol;
            if level >= min_levels && diff <= bound {
                return Ok(DeOutcome {
                    value: s,
                    error: diff,
                    levels: level,
                    nodes,
                });
            }
            if level == max_levels {
                return Err(Error::NonConvergence {
                    value: format_decimal(&s, 20),
                    error: format_decimal(&diff, 3),
                    levels: level,
                });
            }
        }
        prev = Some(s);
    }
    unreachable!("loop returns at max_levels")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(d: i64, wp: u32) -> Float {
        crate::real::pow10(-d, wp)
    }

    #[test]
    fn unit_panel_log_singularity() {
        // int_0^1 -ln u du = 1, computed through the complement-free abscissa
        let wp = 300;
        let zero = Float::with_val(wp, 0);
        let out = integrate(Panel::Unit, &zero, wp, &tol(60, wp), 3, 10, |n, w, _| {
            Ok(Some(Float::with_val(wp, -Float::with_val(wp, n.u.ln_ref())) * w))
        })
        .unwrap();
        assert!(Float::with_val(wp, &out.value - 1u32).abs() < 1e-60);
        assert!(out.error < 1e-55);
    }

    #[test]
    fn unit_panel_uses_complement() {
        // int_0^1 -ln(1-u) du = 1 needs the complement near u = 1
        let wp = 300;
        let zero = Float::with_val(wp, 0);
        let out = integrate(Panel::Unit, &zero, wp, &tol(60, wp), 3, 10, |n, w, _| {
            Ok(Some(Float::with_val(wp, -Float::with_val(wp, n.comp.ln_ref())) * w))
        })
        .unwrap();
        assert!(Float::with_val(wp, &out.value - 1u32).abs() < 1e-60);
    }

    #[test]
    fn tail_panel_exponential() {
        // int_1^inf e^{-u} du = 1/e
        let wp = 300;
        let one = Float::with_val(wp, 1);
        let out = integrate(Panel::Tail, &one, wp, &tol(60, wp), 3, 10, |n, w, _| {
            Ok(Some(Float::with_val(wp, Float::with_val(wp, -&n.u).exp_ref()) * w))
        })
        .unwrap();
        let exact = Float::with_val(wp, -1).exp();
        assert!(Float::with_val(wp, &out.value - &exact).abs() < 1e-60);
    }
}
