//! Weights for Sinc indefinite integration: `sigma_m = 1/2 + Si(pi m)/pi`.

use rug::float::Constant;
use rug::{Assign, Float};
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre nodes and weights on [-1, 1] (positive half plus zero node if odd).
pub(crate) fn gauss_legendre(n: usize, wp: u32) -> Vec<(Float, Float)> {
    let mut out = Vec::with_capacity(n);
    let gp = wp + 20;
    for i in 0..n.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(gp, guess);
        let mut dp = Float::new(gp);
        for _ in 0..100 {
            let (p, d) = legendre(n, &x, gp);
            dp.assign(&d);
            let step = Float::with_val(gp, &p / &d);
            x -= &step;
            if step.is_zero() || step.get_exp().unwrap_or(i32::MIN) < -(gp as i32 - 8) {
                break;
            }
        }
        let (_, d) = legendre(n, &x, gp);
        dp.assign(&d);
        let one_m_x2 = Float::with_val(gp, 1) - Float::with_val(gp, x.square_ref());
        let w = Float::with_val(gp, 2) / (one_m_x2 * Float::with_val(gp, dp.square_ref()));
        out.push((Float::with_val(wp, &x), Float::with_val(wp, &w)));
    }
    out
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: &Float, wp: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = Float::with_val(wp, x);
    for k in 2..=n {
        // k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
        let mut p2 = Float::with_val(wp, x * &p1);
        p2 *= (2 * k - 1) as u32;
        p2 -= Float::with_val(wp, &p0 * (k - 1) as u32);
        p2 /= k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let mut d = Float::with_val(wp, x * &p1);
    d -= &p0;
    d *= n as u32;
    d /= Float::with_val(wp, x.square_ref()) - 1u32;
    (p1, d)
}

struct Table {
    bits: u32,
    /// `Si(pi m) / pi` for m = 0, 1, ...
    si: Vec<Float>,
    nodes: Vec<(Float, Float)>,
}

fn tables() -> &'static Mutex<Vec<Arc<Table>>> {
    static T: OnceLock<Mutex<Vec<Arc<Table>>>> = OnceLock::new();
    T.get_or_init(|| Mutex::new(Vec::new()))
}

/// `sigma_m = 1/2 + Si(pi m)/pi` for `m` in `0..=max_m`; negative indices use
/// `sigma_{-m} = 1 - sigma_m`.
pub(crate) fn sigma_table(max_m: usize, wp: u32) -> Arc<Vec<Float>> {
    let bits = wp.next_multiple_of(64);
    let mut guard = tables().lock().expect("sinc table lock");
    let existing = guard.iter().position(|t| t.bits == bits);
    let table = match existing {
        Some(i) if guard[i].si.len() > max_m => guard[i].clone(),
        Some(i) => {
            let mut t = Table {
                bits,
                si: guard[i].si.clone(),
                nodes: guard[i].nodes.clone(),
            };
            extend(&mut t, max_m);
            let t = Arc::new(t);
            guard[i] = t.clone();
            t
        }
        None => {
            let n_gl = (0.2 * bits as f64) as usize + 12;
            let mut t = Table {
                bits,
                si: vec![Float::with_val(bits, 0)],
                nodes: gauss_legendre(n_gl, bits),
            };
            extend(&mut t, max_m);
            let t = Arc::new(t);
            guard.push(t.clone());
            t
        }
    };
    drop(guard);
    let half = Float::with_val(wp, 0.5);
    Arc::new(
        table.si[..=max_m]
            .iter()
            .map(|s| Float::with_val(wp, s + &half))
            .collect(),
    )
}

/// Append `Si(pi m)/pi` by integrating `sin s / (s + pi m)` over each period.
fn extend(t: &mut Table, max_m: usize) {
    let wp = t.bits;
    let pi = Float::with_val(wp, Constant::Pi);
    let half_pi = Float::with_val(wp, &pi / 2u32);
    // symmetric abscissae s = (pi/2)(1 +- x) with sin s = sin((pi/2)(1 -+ x))
    let mut pts: Vec<(Float, Float, Float)> = Vec::new();
    for (x, w) in &t.nodes {
        let sp = Float::with_val(wp, &half_pi * Float::with_val(wp, 1 + x));
        let sm = Float::with_val(wp, &half_pi * Float::with_val(wp, 1 - x));
        let sin = Float::with_val(wp, sp.sin_ref());
        let ww = Float::with_val(wp, w * &half_pi) * &sin;
        if x.is_zero() {
            pts.push((sp, Float::new(wp), ww));
        } else {
            pts.push((sp, sm, ww));
        }
    }
    let mut shift = Float::new(wp);
    let mut acc = Float::new(wp);
    while t.si.len() <= max_m {
        let m = t.si.len() - 1;
        shift.assign(&pi * m as u32);
        acc.assign(0);
        for (sp, sm, ww) in &pts {
            acc += Float::with_val(wp, ww / Float::with_val(wp, sp + &shift));
            if !sm.is_zero() {
                acc += Float::with_val(wp, ww / Float::with_val(wp, sm + &shift));
            }
        }
        // the period from pi m to pi (m+1) carries sign (-1)^m
        acc /= &pi;
        let last = t.si.last().expect("seeded").clone();
        let next = if m.is_multiple_of(2) { last + &acc } else { last - &acc };
        t.si.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let wp = 200;
        let nodes = gauss_legendre(12, wp);
        // int_{-1}^1 x^22 = 2/23, exact for 12 points
        let mut s = Float::with_val(wp, 0);
        for (x, w) in &nodes {
            let v = Float::with_val(wp, x.pow_ref_u(22)) * w;
            s += if x.is_zero() { v } else { v * 2u32 };
        }
        let exact = Float::with_val(wp, 2) / 23u32;
        assert!(Float::with_val(wp, &s - &exact).abs() < 1e-55);
    }

    trait PowU {
        fn pow_ref_u(&self, n: u32) -> Float;
    }
    impl PowU for Float {
        fn pow_ref_u(&self, n: u32) -> Float {
            let mut r = Float::with_val(self.prec(), 1);
            for _ in 0..n {
                r *= self;
            }
            r
        }
    }

    #[test]
    fn sine_integral_values() {
        // Si(pi) = 1.851937051982466170361053370157991363345809728981...
        let wp = 256;
        let s = sigma_table(40, wp);
        let pi = Float::with_val(wp, Constant::Pi);
        let si_pi = Float::with_val(wp, &s[1] - 0.5f64) * &pi;
        let reference = Float::with_val(
            wp,
            Float::parse("1.851937051982466170361053370157991363345809728981").unwrap(),
        );
        assert!(Float::with_val(wp, &si_pi - &reference).abs() < 1e-45);
        // Si(x) -> pi/2 so sigma_m -> 1 with alternating approach
        let tail = Float::with_val(wp, &s[40] - 1u32).abs();
        assert!(tail < 0.01 && tail > 1e-4);
    }
}
