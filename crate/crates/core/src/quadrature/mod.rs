//! Bessel moment integrals and nested (iterated) moment integrals.

pub(crate) mod de;
mod nested;
pub(crate) mod sinc;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::real::{BigReal, Precision};
use crate::specfun::bessel::{self, BesselSet};
use de::{integrate, Panel};

pub use nested::{
    f_family, g_family, i_rho2_alpha6, i_rho2_alpha6_wronskian_form, nested_moment, nested_moment_upper,
};

/// Integrand `u^p K0^a K1^b I0^c I1^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BesselProduct {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl BesselProduct {
    pub const fn new(p: u32, a: u32, b: u32, c: u32, d: u32) -> Self {
        BesselProduct { p, a, b, c, d }
    }

    /// `u^p K0^a`.
    pub const fn k0_power(p: u32, a: u32) -> Self {
        BesselProduct::new(p, a, 0, 0, 0)
    }

    /// Power of `u` governing the behaviour at 0 (up to logarithms).
    pub fn order_at_zero(&self) -> i64 {
        self.p as i64 - self.b as i64 + self.d as i64
    }

    /// Net exponential decay rate at infinity.
    pub fn decay_rate(&self) -> i64 {
        (self.a + self.b) as i64 - (self.c + self.d) as i64
    }

    pub fn needs_i(&self) -> bool {
        self.c + self.d > 0
    }

    pub fn weight(&self) -> u32 {
        self.a + self.b + self.c + self.d
    }

    /// Multiply two products.
    pub fn times(&self, o: &BesselProduct) -> BesselProduct {
        BesselProduct::new(self.p + o.p, self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn check_integrable(&self) -> Result<()> {
        if self.order_at_zero() <= -1 {
            return Err(Error::Divergent {
                endpoint: "0".into(),
                reason: format!(
                    "{self} behaves like u^{} near 0 (needs p - b + d > -1)",
                    self.order_at_zero()
                ),
            });
        }
        if self.decay_rate() <= 0 {
            return Err(Error::Divergent {
                endpoint: "infinity".into(),
                reason: format!("{self} has no exponential decay (needs a + b > c + d)"),
            });
        }
        Ok(())
    }

    /// Value at `u` from precomputed Bessel values.
    pub(crate) fn eval(&self, u: &Float, s: &BesselSet, wp: u32) -> Float {
        let mut r = Float::with_val(wp, 1);
        mul_pow(&mut r, u, self.p);
        mul_pow(&mut r, &s.k0, self.a);
        mul_pow(&mut r, &s.k1, self.b);
        if self.c > 0 {
            mul_pow(&mut r, s.i0.as_ref().expect("I0 computed"), self.c);
        }
        if self.d > 0 {
            mul_pow(&mut r, s.i1.as_ref().expect("I1 computed"), self.d);
        }
        r
    }

    /// Rough natural log of the integrand at `u = exp(ln_u)`.
    pub(crate) fn ln_estimate(&self, ln_u: f64) -> f64 {
        let mut l = self.p as f64 * ln_u;
        if self.a > 0 {
            l += self.a as f64 * bessel::ln_k0_estimate(ln_u);
        }
        if self.b > 0 {
            l += self.b as f64 * bessel::ln_k1_estimate(ln_u);
        }
        if self.c > 0 {
            l += self.c as f64 * bessel::ln_i0_estimate(ln_u);
        }
        if self.d > 0 {
            l += self.d as f64 * bessel::ln_i1_estimate(ln_u);
        }
        l
    }
}

fn mul_pow(r: &mut Float, x: &Float, n: u32) {
    for _ in 0..n {
        *r *= x;
    }
}

impl fmt::Display for BesselProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut push = |name: &str, e: u32| match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        };
        push("u", self.p);
        push("K0", self.a);
        push("K1", self.b);
        push("I0", self.c);
        push("I1", self.d);
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    /// Value whose radius equals `error_estimate`.
    pub value: BigReal,
    pub error_estimate: Float,
    pub levels_used: u32,
    pub nodes: usize,
}

impl QuadratureResult {
    pub(crate) fn new(value: Float, error: Float, levels_used: u32, nodes: usize) -> Self {
        let err = Float::with_val(64, &error + crate::real::ulp(&value));
        QuadratureResult {
            value: BigReal::new(value, err.clone()),
            error_estimate: err,
            levels_used,
            nodes,
        }
    }

    /// Scale by an exact rational.
    pub fn scale(&self, q: &Rational) -> QuadratureResult {
        let p = self.value.prec();
        let v = Float::with_val(p, self.value.value() * Float::with_val(p, q));
        let e = Float::with_val(64, &self.error_estimate * Float::with_val(64, q).abs());
        QuadratureResult::new(v, e, self.levels_used, self.nodes)
    }
}

/// Tuning knobs shared by the quadrature routines.
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub max_levels: u32,
    pub min_levels: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            max_levels: 12,
            min_levels: 3,
        }
    }
}

/// Working precision for quadrature sums.
pub(crate) fn working_bits(prec: &Precision) -> u32 {
    prec.bits() + 16
}

/// `int_0^inf u^p K0^a K1^b I0^c I1^d du`.
pub fn moment(f: &BesselProduct, prec: &Precision) -> Result<QuadratureResult> {
    moment_with(f, prec, &QuadOptions::default())
}

pub fn moment_with(f: &BesselProduct, prec: &Precision, opts: &QuadOptions) -> Result<QuadratureResult> {
    f.check_integrable()?;
    let wp = working_bits(prec);
    let tol = Float::with_val(wp, prec.tolerance() / 4u32);
    let need_i = f.needs_i();
    let mut eval = |n: &de::Node, w: &Float, ln_thr: f64| -> Result<Option<Float>> {
        let ln_u = ln_of(&n.u);
        if f.ln_estimate(ln_u) + w.to_f64().ln() < ln_thr - 30.0 {
            return Ok(None);
        }
        let s = bessel::bessel_set(&n.u, wp, need_i);
        let mut v = f.eval(&n.u, &s, wp);
        v *= w;
        Ok(Some(v))
    };
    let zero = Float::with_val(wp, 0);
    let one = Float::with_val(wp, 1);
    let lo = integrate(Panel::Unit, &zero, wp, &tol, opts.min_levels, opts.max_levels, &mut eval)?;
    let hi = integrate(Panel::Tail, &one, wp, &tol, opts.min_levels, opts.max_levels, &mut eval)?;
    let value = Float::with_val(wp, &lo.value + &hi.value);
    let error = Float::with_val(64, &lo.error + &hi.error);
    Ok(QuadratureResult::new(
        value,
        error,
        lo.levels.max(hi.levels),
        lo.nodes + hi.nodes,
    ))
}

/// Natural log of a positive float as f64, safe for huge exponents.
pub(crate) fn ln_of(x: &Float) -> f64 {
    match x.get_exp() {
        Some(e) => {
            let m = Float::with_val(64, x >> e);
            m.to_f64().ln() + e as f64 * std::f64::consts::LN_2
        }
        None => f64::NEG_INFINITY,
    }
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `I_{n,j}^{(kappa)} = (1/n!) int_0^inf u^{n+1} K0^{kappa-j} K1^j du`.
pub fn normalized_moment(kappa: u32, n: u32, j: u32, prec: &Precision) -> Result<QuadratureResult> {
    if j > kappa {
        return Err(Error::Domain(format!("j = {j} exceeds kappa = {kappa}")));
    }
    if n + 1 < j {
        return Err(Error::Domain(format!(
            "I_{{{n},{j}}}^({kappa}) diverges: needs n >= j - 1"
        )));
    }
    let f = BesselProduct::new(n + 1, kappa - j, j, 0, 0);
    let r = moment(&f, prec)?;
    Ok(r.scale(&Rational::from((1, factorial(n)))))
}

/// One row of the large-`n` sequences.
#[derive(Clone, Debug)]
pub struct LimitRow {
    pub n: u32,
    /// `2^(n-1)/n! int u K0^n`, tending to `exp(2 psi_0(1))`.
    pub weighted: BigReal,
    /// `1/n! int K0^n`, tending to `2 exp(psi_0(1))`.
    pub plain: BigReal,
}

#[derive(Clone, Debug)]
pub struct LargeNLimits {
    pub rows: Vec<LimitRow>,
    pub weighted_limit: BigReal,
    pub plain_limit: BigReal,
    /// Distance to the limit shrinks at every step for both sequences.
    pub monotone: bool,
}

fn exp_real(x: &BigReal) -> BigReal {
    let v = Float::with_val(x.prec(), x.value().exp_ref());
    // |d exp| <= exp(x + r) r
    let hi = Float::with_val(64, x.value() + x.radius()).exp();
    let r = Float::with_val(64, &hi * x.radius());
    BigReal::rounded(v).widen(&r)
}

/// The sequences `2^(n-1)/n! int u K0^n` and `1/n! int K0^n` for `n` in
/// `1..=n_max`, with their limits.
pub fn large_n_limits(n_max: u32, prec: &Precision) -> Result<LargeNLimits> {
    if n_max < 2 {
        return Err(Error::Domain("large-n limits need n_max >= 2".into()));
    }
    let psi = crate::specfun::digamma_at_one(prec);
    let weighted_limit = exp_real(&(&psi + &psi));
    let two = BigReal::exact(Float::with_val(prec.bits(), 2));
    let plain_limit = &two * &exp_real(&psi);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let f = factorial(n);
        let a = moment(&BesselProduct::k0_power(1, n), prec)?.scale(&Rational::from((Integer::from(1) << (n - 1), f.clone())));
        let b = moment(&BesselProduct::k0_power(0, n), prec)?.scale(&Rational::from((1, f)));
        rows.push(LimitRow {
            n,
            weighted: a.value,
            plain: b.value,
        });
    }
    let dist = |x: &BigReal, l: &BigReal| Float::with_val(64, x.value() - l.value()).abs();
    let monotone = rows.windows(2).all(|w| {
        dist(&w[1].weighted, &weighted_limit) < dist(&w[0].weighted, &weighted_limit)
            && dist(&w[1].plain, &plain_limit) < dist(&w[0].plain, &plain_limit)
    });
    Ok(LargeNLimits {
        rows,
        weighted_limit,
        plain_limit,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun;

    #[test]
    fn integrability_diagnostics() {
        let bad0 = BesselProduct::new(0, 0, 1, 0, 0);
        match bad0.check_integrable() {
            Err(Error::Divergent { endpoint, .. }) => assert_eq!(endpoint, "0"),
            other => panic!("{other:?}"),
        }
        let bad_inf = BesselProduct::new(1, 1, 0, 1, 0);
        match bad_inf.check_integrable() {
            Err(Error::Divergent { endpoint, .. }) => assert_eq!(endpoint, "infinity"),
            other => panic!("{other:?}"),
        }
        assert!(moment(&bad_inf, &Precision::digits(20)).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(BesselProduct::new(3, 2, 1, 0, 1).to_string(), "u^3*K0^2*K1*I1");
        assert_eq!(BesselProduct::new(0, 0, 0, 0, 0).to_string(), "1");
    }

    #[test]
    fn u_k0_is_one() {
        let r = moment(&BesselProduct::k0_power(1, 1), &Precision::digits(40)).unwrap();
        assert!(r.value.contains(&Float::with_val(200, 1)));
        assert!(r.error_estimate < 1e-39);
    }

    #[test]
    fn u_k0_four_is_seven_eighths_zeta3() {
        let p = Precision::digits(40);
        let r = moment(&BesselProduct::k0_power(1, 4), &p).unwrap();
        let z = specfun::zeta(3, &p).unwrap().mul_rational(&Rational::from((7, 8)));
        let d = Float::with_val(200, r.value.value() - z.value()).abs();
        assert!(d < 1e-39, "{d}");
    }

    #[test]
    fn normalized_seed() {
        let p = Precision::digits(30);
        for kappa in [3u32, 4] {
            let r = normalized_moment(kappa, kappa - 1, kappa - 1, &p).unwrap();
            let exact = Float::with_val(200, Rational::from((1, factorial(kappa))));
            let d = Float::with_val(200, r.value.value() - &exact).abs();
            assert!(d < 1e-29);
        }
        assert!(normalized_moment(3, 0, 2, &p).is_err());
        assert!(normalized_moment(3, 1, 4, &p).is_err());
    }
}
