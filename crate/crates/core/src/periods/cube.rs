//! Tensorized tanh-sinh quadrature on the unit cube with level doubling.

use rug::Float;

use crate::quadrature::de::{node, Panel};

/// One axis node: abscissa, its complement `1 - s`, and the weight times `h`.
pub(crate) struct AxisNode {
    pub s: Float,
    pub c: Float,
    pub w: Float,
}

pub(crate) struct CubeOutcome {
    pub value: Float,
    pub error: Float,
    pub levels: u32,
    pub nodes: usize,
    pub converged: bool,
}

/// Truncation of the `t` axis so that the dropped weights stay below
/// `10^-(digits + 10)`.
fn t_max(digits: u32) -> f64 {
    let x = (digits as f64 + 10.0) * std::f64::consts::LN_10 / std::f64::consts::PI;
    x.asinh() + 0.25
}

fn axis(level: u32, digits: u32, wp: u32) -> Vec<AxisNode> {
    let zero = Float::with_val(wp, 0);
    let h = Float::with_val(wp, 1) >> (level + 1);
    let kmax = (t_max(digits) * f64::from(1u32 << (level + 1))).ceil() as i64;
    (-kmax..=kmax)
        .map(|k| {
            let t = Float::with_val(wp, &h * k);
            let (nd, w) = node(Panel::Unit, &t, &zero, wp);
            AxisNode {
                s: nd.u,
                c: nd.comp,
                w: w * &h,
            }
        })
        .collect()
}

/// Integrate `f(s, 1 - s)` over `(0,1)^dim`. Stops when two successive levels
/// agree to `tol` (relative to `max(|I|, 1)`) or when the next level would
/// exceed `max_nodes` evaluations. The error is extrapolated from the last two
/// level differences.
pub(crate) fn integrate_cube<F>(
    dim: usize,
    digits: u32,
    wp: u32,
    tol: &Float,
    min_level: u32,
    max_nodes: usize,
    mut f: F,
) -> CubeOutcome
where
    F: FnMut(&[&Float], &[&Float]) -> Float,
{
    let mut prev: Option<Float> = None;
    let mut prev_diff: Option<f64> = None;
    let mut total = 0usize;
    let mut level = 0u32;
    loop {
        let ax = axis(level, digits, wp);
        let m = ax.len();
        let count = m.pow(dim as u32);
        if prev.is_some() && total + count > max_nodes {
            let value = prev.unwrap_or_else(|| Float::new(wp));
            return CubeOutcome {
                error: Float::with_val(64, rug::float::Special::Infinity),
                value,
                levels: level.saturating_sub(1),
                nodes: total,
                converged: false,
            };
        }
        let mut sum = Float::with_val(wp, 0);
        let mut idx = vec![0usize; dim];
        let mut s: Vec<&Float> = Vec::with_capacity(dim);
        let mut c: Vec<&Float> = Vec::with_capacity(dim);
        for _ in 0..count {
            s.clear();
            c.clear();
            let mut w = Float::with_val(wp, 1);
            for &i in &idx {
                s.push(&ax[i].s);
                c.push(&ax[i].c);
                w *= &ax[i].w;
            }
            let v = f(&s, &c);
            sum += v * w;
            for d in idx.iter_mut() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        total += count;
        if let Some(p) = prev.as_ref() {
            let diff = Float::with_val(64, Float::with_val(wp, &sum - p).abs_ref());
            let d1 = diff.to_f64().log10();
            let diff = match prev_diff {
                Some(d0) if d1 < d0 && d0 < 0.0 => {
                    // digits grow geometrically from level to level; extrapolate one
                    // step and keep three digits in reserve
                    let est = (d1 * d1 / d0 + 3.0).min(d1);
                    Float::with_val(64, 10f64.powf(est))
                }
                _ => diff,
            };
            prev_diff = Some(d1);
            let bound = Float::with_val(64, sum.abs_ref()).max(&Float::with_val(64, 1)) * tol;
            if level >= min_level && diff <= bound {
                return CubeOutcome {
                    value: sum,
                    error: diff,
                    levels: level,
                    nodes: total,
                    converged: true,
                };
            }
            // a level whose successor would blow the budget ends the run with an honest error
            if total + (2 * m).pow(dim as u32) > max_nodes {
                return CubeOutcome {
                    value: sum,
                    error: diff,
                    levels: level,
                    nodes: total,
                    converged: false,
                };
            }
        }
        prev = Some(sum);
        level += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::pow10;

    #[test]
    fn corner_singularity() {
        // int_0^1 int_0^1 dx dy / (x + y) = 2 ln 2
        let wp = 160;
        let out = integrate_cube(2, 30, wp, &pow10(-30, wp), 2, 2_000_000, |s, _| {
            Float::with_val(wp, Float::with_val(wp, s[0] + s[1]).recip_ref())
        });
        let exact = Float::with_val(wp, 2) * Float::with_val(wp, rug::float::Constant::Log2);
        assert!(out.converged);
        assert!(Float::with_val(wp, &out.value - &exact).abs() < 1e-28);
    }

    #[test]
    fn one_dimensional_uses_complement() {
        // int_0^1 -ln(1 - s) ds = 1
        let wp = 200;
        let out = integrate_cube(1, 50, wp, &pow10(-50, wp), 2, 100_000, |_, c| {
            -Float::with_val(wp, c[0].ln_ref())
        });
        assert!(Float::with_val(wp, &out.value - 1u32).abs() < 1e-50);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let wp = 100;
        let out = integrate_cube(3, 25, wp, &pow10(-25, wp), 2, 20_000, |s, _| {
            { let mut t = Float::with_val(wp, s[0] + s[1]); t += s[2]; t.recip() }
        });
        assert!(!out.converged);
        assert!(out.nodes <= 20_000);
    }
}
