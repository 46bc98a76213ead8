//! Period representations of `int u^p K0^n` and `int u I0 K0^n`: rational
//! integrands over the standard simplex, their log-kernel reductions, and
//! numeric cross-validation against direct Bessel quadrature.
//!
//! With `a` in the open simplex of dimension `m`, `u = e_1(a)`,
//! `v = e_{m-1}(a)` and `w = e_m(a)`:
//!
//! * raw, `p = 1`: `2^(n-1) int u K0^n = int 1/(w + (1-u) v)`
//! * raw, `p = 3`: `2^(n-3) int u^3 K0^n = int w (1-u)/(w + (1-u) v)^2`
//! * mixed: `2^(n-1) int u I0 K0^n = int 1/(w u + (1-u) v)`
//!
//! over `m = n - 1` dimensions. The log-kernel forms live on `m = n - 2`
//! dimensions with `X = e_1(x)` and `L = log((1+X)/(1-X))`:
//!
//! * `p = 1`: `L * 4/(4 X w + (1 - X^2) v)`
//! * `p = 3`: `((1+X^2)/(2X) L - 1) * 4 w (1 - X^2)/(4 X w + (1 - X^2) v)^2`

mod cube;
mod qmc;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{moment, BesselProduct, QuadratureResult};
use crate::real::{BigReal, Precision};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    RawSimplex,
    LogKernel,
    MixedI0,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::RawSimplex => "raw_simplex",
            Form::LogKernel => "log_kernel",
            Form::MixedI0 => "mixed_i0",
        })
    }
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Form> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "raw_simplex" | "raw" | "simplex" => Ok(Form::RawSimplex),
            "log_kernel" | "log" => Ok(Form::LogKernel),
            "mixed_i0" | "mixed" => Ok(Form::MixedI0),
            _ => Err(Error::InvalidArgument(format!("unknown period form {s}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub n: u32,
    pub p: u32,
    pub form: Form,
}

impl PeriodSpec {
    pub fn new(n: u32, p: u32, form: Form) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("period forms need n >= 3, got {n}")));
        }
        if p != 1 && p != 3 {
            return Err(Error::InvalidArgument(format!("period forms need p in {{1, 3}}, got {p}")));
        }
        if form == Form::MixedI0 && p != 1 {
            return Err(Error::InvalidArgument("the mixed I0 form exists only for p = 1".into()));
        }
        Ok(PeriodSpec { n, p, form })
    }

    pub fn dimension(&self) -> usize {
        match self.form {
            Form::LogKernel => self.n as usize - 2,
            _ => self.n as usize - 1,
        }
    }

    /// Factor `c` with `period = c * moment`.
    pub fn normalization(&self) -> Integer {
        let e = if self.p == 1 { self.n - 1 } else { self.n - 3 };
        Integer::from(1) << e
    }

    /// The Bessel moment this period represents.
    pub fn bessel_product(&self) -> BesselProduct {
        match self.form {
            Form::MixedI0 => BesselProduct::new(1, self.n, 0, 1, 0),
            _ => BesselProduct::k0_power(self.p, self.n),
        }
    }

    /// `normalization * moment` by direct Bessel quadrature.
    pub fn direct(&self, prec: &Precision) -> Result<QuadratureResult> {
        let m = moment(&self.bessel_product(), prec)?;
        Ok(m.scale(&Rational::from(self.normalization())))
    }
}

impl fmt::Display for PeriodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} p={}", self.form, self.n, self.p)
    }
}

/// `(e_1, e_{m-1}, e_m)` of an `m`-tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTriple {
    pub u: BigReal,
    pub v: BigReal,
    pub w: BigReal,
}

/// `e_{m-1}` as the sum of products omitting one entry, via prefix and suffix
/// products; `e_0 = 1` for a single entry.
fn omit_one_sum<T: Clone>(a: &[T], one: T, mul: impl Fn(&T, &T) -> T, add: impl Fn(&T, &T) -> T) -> T {
    let m = a.len();
    let mut suffix = vec![one.clone(); m + 1];
    for i in (0..m).rev() {
        suffix[i] = mul(&suffix[i + 1], &a[i]);
    }
    let mut prefix = one;
    let mut acc: Option<T> = None;
    for i in 0..m {
        let term = mul(&prefix, &suffix[i + 1]);
        acc = Some(match acc {
            None => term,
            Some(s) => add(&s, &term),
        });
        prefix = mul(&prefix, &a[i]);
    }
    acc.expect("nonempty")
}

pub fn sym_triple(a: &[BigReal]) -> Result<SymTriple> {
    let Some(first) = a.first() else {
        return Err(Error::InvalidArgument("sym_triple needs at least one entry".into()));
    };
    let bits = a.iter().map(BigReal::prec).max().unwrap_or(first.prec());
    let one = BigReal::exact(Float::with_val(bits, 1));
    let mut u = BigReal::exact(Float::with_val(bits, 0));
    let mut w = one.clone();
    for x in a {
        u = &u + x;
        w = &w * x;
    }
    let v = omit_one_sum(a, one, |x, y| x * y, |x, y| x + y);
    Ok(SymTriple { u, v, w })
}

/// Exact rational version of [`sym_triple`].
pub fn sym_triple_exact(a: &[Rational]) -> Result<(Rational, Rational, Rational)> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("sym_triple needs at least one entry".into()));
    }
    let u: Rational = a.iter().sum();
    let w: Rational = a.iter().product();
    let v = omit_one_sum(a, Rational::from(1), |x, y| Rational::from(x * y), |x, y| Rational::from(x + y));
    Ok((u, v, w))
}

fn check_interior(positive: impl Iterator<Item = bool>, sum_below_one: bool, what: &str) -> Result<()> {
    let mut any = false;
    for p in positive {
        any = true;
        if !p {
            return Err(Error::Domain(format!("{what}: point on or outside the simplex boundary")));
        }
    }
    if !any {
        return Err(Error::InvalidArgument(format!("{what}: empty point")));
    }
    if !sum_below_one {
        return Err(Error::Domain(format!("{what}: coordinates sum to 1 or more")));
    }
    Ok(())
}

fn check_dimension(spec: &PeriodSpec, len: usize) -> Result<()> {
    if len != spec.dimension() {
        return Err(Error::InvalidArgument(format!(
            "{spec} lives in dimension {}, got a point with {len} coordinates",
            spec.dimension()
        )));
    }
    Ok(())
}

/// Raw or mixed simplex integrand at `a` (exact rational arithmetic).
pub fn simplex_integrand_exact(spec: &PeriodSpec, a: &[Rational]) -> Result<Rational> {
    if spec.form == Form::LogKernel {
        return Err(Error::InvalidArgument("the log-kernel integrand is not rational".into()));
    }
    check_dimension(spec, a.len())?;
    let (u, v, w) = sym_triple_exact(a)?;
    check_interior(a.iter().map(|x| *x > 0), u < 1, "simplex_integrand")?;
    let rest = Rational::from(1 - &u);
    let rv = Rational::from(&rest * &v);
    Ok(match (spec.form, spec.p) {
        (Form::MixedI0, _) => (Rational::from(&w * &u) + rv).recip(),
        (_, 1) => (w + rv).recip(),
        _ => {
            let d = Rational::from(&w + &rv);
            Rational::from(&w * &rest) / d.square()
        }
    })
}

/// Raw or mixed simplex integrand at `a` with error propagation.
pub fn simplex_integrand(spec: &PeriodSpec, a: &[BigReal]) -> Result<BigReal> {
    if spec.form == Form::LogKernel {
        return Err(Error::InvalidArgument("use log_kernel_integrand for the log-kernel form".into()));
    }
    check_dimension(spec, a.len())?;
    let t = sym_triple(a)?;
    check_interior(a.iter().map(|x| x.value().is_sign_positive() && !x.value().is_zero()), *t.u.value() < 1, "simplex_integrand")?;
    let one = BigReal::exact(Float::with_val(t.u.prec(), 1));
    let rest = &one - &t.u;
    let rv = &rest * &t.v;
    Ok(match (spec.form, spec.p) {
        (Form::MixedI0, _) => (&(&t.w * &t.u) + &rv).recip(),
        (_, 1) => (&t.w + &rv).recip(),
        _ => {
            let d = &t.w + &rv;
            &(&t.w * &rest) / &d.sqr()
        }
    })
}

/// Log-kernel integrand at `x` with error propagation.
pub fn log_kernel_integrand(spec: &PeriodSpec, x: &[BigReal]) -> Result<BigReal> {
    if spec.form != Form::LogKernel {
        return Err(Error::InvalidArgument("use simplex_integrand for the simplex forms".into()));
    }
    check_dimension(spec, x.len())?;
    let t = sym_triple(x)?;
    check_interior(x.iter().map(|v| v.value().is_sign_positive() && !v.value().is_zero()), *t.u.value() < 1, "log_kernel_integrand")?;
    let bits = t.u.prec();
    let one = BigReal::exact(Float::with_val(bits, 1));
    let four = BigReal::exact(Float::with_val(bits, 4));
    let big_x = &t.u;
    let l = (&(&one + big_x) / &(&one - big_x)).ln();
    let one_m_x2 = &one - &big_x.sqr();
    let d = &(&four * &(big_x * &t.w)) + &(&one_m_x2 * &t.v);
    Ok(if spec.p == 1 {
        &(&four * &l) / &d
    } else {
        let two_x = big_x * &BigReal::exact(Float::with_val(bits, 2));
        let k = &(&(&(&one + &big_x.sqr()) / &two_x) * &l) - &one;
        let num = &four * &(&t.w * &one_m_x2);
        &(&k * &num) / &d.sqr()
    })
}

/// Float integrand in cube coordinates: the point `s` (with complements `c`)
/// maps to the simplex by `a_1 = s_1`, `a_2 = s_2 (1 - s_1)`, ..., and the
/// Jacobian of that map is folded in.
fn cube_integrand(spec: &PeriodSpec, s: &[&Float], c: &[&Float], wp: u32) -> Float {
    let m = s.len();
    let mut a = Vec::with_capacity(m);
    let mut rest = Float::with_val(wp, 1);
    let mut jac = Float::with_val(wp, 1);
    for i in 0..m {
        a.push(Float::with_val(wp, s[i] * &rest));
        jac *= &rest;
        rest *= c[i];
    }
    let mut u = Float::with_val(wp, 0);
    let mut w = Float::with_val(wp, 1);
    for x in &a {
        u += x;
        w *= x;
    }
    let v = omit_one_sum(&a, Float::with_val(wp, 1), |x, y| Float::with_val(wp, x * y), |x, y| {
        Float::with_val(wp, x + y)
    });
    let rv = Float::with_val(wp, &rest * &v);
    match (spec.form, spec.p) {
        (Form::MixedI0, _) => {
            let d = Float::with_val(wp, &w * &u) + &rv;
            jac / d
        }
        (Form::RawSimplex, 1) => jac / (w + rv),
        (Form::RawSimplex, _) => {
            let d = Float::with_val(wp, &w + &rv);
            let num = Float::with_val(wp, &w * &rest) * jac;
            num / d.square()
        }
        (Form::LogKernel, p) => {
            // 1 - X = rest, 1 - X^2 = rest (1 + X)
            let l = log_ratio(&u, &rest, wp);
            let one_m_x2 = Float::with_val(wp, &u + 1u32) * &rest;
            let d = Float::with_val(wp, &u * &w) * 4u32 + Float::with_val(wp, &one_m_x2 * &v);
            if p == 1 {
                jac * l * 4u32 / d
            } else {
                let k = appendix_k(&u, &l, wp);
                let num = Float::with_val(wp, &w * &one_m_x2) * 4u32;
                jac * k * num / d.square()
            }
        }
    }
}

/// Double precision twin of [`cube_integrand`] for sampling.
fn cube_integrand_f64(spec: &PeriodSpec, s: &[f64], c: &[f64]) -> f64 {
    let mut a = [0.0; 16];
    let m = s.len();
    let mut rest = 1.0;
    let mut jac = 1.0;
    for i in 0..m {
        a[i] = s[i] * rest;
        jac *= rest;
        rest *= c[i];
    }
    let a = &a[..m];
    let u: f64 = a.iter().sum();
    let w: f64 = a.iter().product();
    let v = omit_one_sum(a, 1.0, |x, y| x * y, |x, y| x + y);
    match (spec.form, spec.p) {
        (Form::MixedI0, _) => jac / (w * u + rest * v),
        (Form::RawSimplex, 1) => jac / (w + rest * v),
        (Form::RawSimplex, _) => jac * w * rest / (w + rest * v).powi(2),
        (Form::LogKernel, p) => {
            let l = if u < 0.5 { 2.0 * u.atanh() } else { u.ln_1p() - rest.ln() };
            let one_m_x2 = (1.0 + u) * rest;
            let d = 4.0 * u * w + one_m_x2 * v;
            if p == 1 {
                jac * l * 4.0 / d
            } else {
                let k = (1.0 + u * u) / (2.0 * u) * l - 1.0;
                jac * k * 4.0 * w * one_m_x2 / (d * d)
            }
        }
    }
}

/// `(1 + X^2)/(2X) L - 1` with `L = log((1+X)/(1-X))`.
fn appendix_k(x: &Float, l: &Float, wp: u32) -> Float {
    let x2 = Float::with_val(wp, x.square_ref());
    let r = Float::with_val(wp, &x2 + 1u32) / Float::with_val(wp, x * 2u32);
    r * l - 1u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMethod {
    TensorDe,
    Qmc,
}

/// Resources for [`evaluate_period`]. Deterministic quadrature is used for
/// dimension at most 3 unless `force_qmc` is set.
#[derive(Clone, Copy, Debug)]
pub struct PeriodBudget {
    pub prec: Precision,
    pub max_nodes: usize,
    pub qmc_points: u64,
    pub qmc_shifts: u32,
    pub seed: u64,
    pub force_qmc: bool,
}

impl PeriodBudget {
    pub fn new(prec: Precision) -> Self {
        PeriodBudget {
            prec,
            max_nodes: 12_000_000,
            qmc_points: 1 << 22,
            qmc_shifts: 8,
            seed: 0,
            force_qmc: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodResult {
    pub spec: PeriodSpec,
    pub method: PeriodMethod,
    /// False for QMC results and for deterministic runs stopped by the budget.
    pub certified: bool,
    pub result: QuadratureResult,
}

const MAX_DE_DIMENSION: usize = 3;

/// Numeric value of the period integral (the normalized moment).
pub fn evaluate_period(spec: &PeriodSpec, budget: &PeriodBudget) -> Result<PeriodResult> {
    let dim = spec.dimension();
    if budget.force_qmc || dim > MAX_DE_DIMENSION {
        return evaluate_qmc(spec, budget);
    }
    let prec = &budget.prec;
    let wp = prec.bits() + 16;
    let digits = prec.target_digits + prec.guard_digits;
    let tol = prec.tolerance();
    let out = cube::integrate_cube(dim, digits, wp, &tol, 2, budget.max_nodes, |s, c| {
        cube_integrand(spec, s, c, wp)
    });
    Ok(PeriodResult {
        spec: *spec,
        method: PeriodMethod::TensorDe,
        certified: out.converged,
        result: QuadratureResult::new(out.value, out.error, out.levels, out.nodes),
    })
}

/// Error bar of a QMC result in standard errors.
pub const QMC_SIGMAS: f64 = 3.0;

fn evaluate_qmc(spec: &PeriodSpec, budget: &PeriodBudget) -> Result<PeriodResult> {
    if budget.qmc_points == 0 || budget.qmc_shifts < 2 {
        return Err(Error::InvalidArgument("QMC needs points > 0 and at least two shifts".into()));
    }
    if spec.dimension() > 16 {
        return Err(Error::InvalidArgument("QMC sampling supports up to 16 dimensions".into()));
    }
    let dim = spec.dimension();
    let mut s = vec![0.0; dim];
    let mut c = vec![0.0; dim];
    // the warp t -> t^3 (10 - 15t + 6t^2) flattens the integrable singularities
    // on the faces and at the vertices enough for a finite variance
    let out = qmc::integrate_qmc(dim, budget.qmc_points, budget.qmc_shifts, budget.seed, |t| {
        let mut jac = 1.0;
        for j in 0..dim {
            let (x, y) = (t[j], 1.0 - t[j]);
            if x <= 0.0 || y <= 0.0 {
                return 0.0;
            }
            s[j] = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
            c[j] = y * y * y * (1.0 + 3.0 * x + 6.0 * x * x);
            jac *= 30.0 * x * x * y * y;
        }
        cube_integrand_f64(spec, &s, &c) * jac
    });
    let err = Float::with_val(64, QMC_SIGMAS * out.std_error);
    let nodes = (budget.qmc_points * u64::from(budget.qmc_shifts)) as usize;
    Ok(PeriodResult {
        spec: *spec,
        method: PeriodMethod::Qmc,
        certified: false,
        result: QuadratureResult::new(Float::with_val(53, out.mean), err, 0, nodes),
    })
}

/// A period evaluation next to the directly computed normalized moment.
#[derive(Clone, Debug)]
pub struct PeriodCheck {
    pub period: PeriodResult,
    pub direct: QuadratureResult,
    pub difference: Float,
    /// `-log10 |difference / direct|`.
    pub agreeing_digits: f64,
    /// Whether the difference lies within the combined error estimates.
    pub within_error: bool,
}

pub fn cross_check(spec: &PeriodSpec, budget: &PeriodBudget) -> Result<PeriodCheck> {
    let period = evaluate_period(spec, budget)?;
    let direct = spec.direct(&budget.prec)?;
    let bits = budget.prec.bits();
    let difference = Float::with_val(bits, period.result.value.value() - direct.value.value()).abs();
    let rel = Float::with_val(64, &difference / direct.value.value()).abs();
    let agreeing_digits = if rel.is_zero() {
        f64::from(budget.prec.target_digits)
    } else {
        -rel.to_f64().log10()
    };
    let within_error = period.result.value.overlaps(&direct.value);
    Ok(PeriodCheck {
        period,
        direct,
        difference,
        agreeing_digits,
        within_error,
    })
}

fn integrate_unit<F>(prec: &Precision, mut f: F) -> Result<QuadratureResult>
where
    F: FnMut(&Float, &Float, u32) -> Float,
{
    let wp = prec.bits() + 16;
    let digits = prec.target_digits + prec.guard_digits;
    let out = cube::integrate_cube(1, digits, wp, &prec.tolerance(), 3, 1 << 20, |s, c| f(s[0], c[0], wp));
    if !out.converged {
        return Err(Error::NonConvergence {
            value: out.value.to_string(),
            error: out.error.to_string(),
            levels: out.levels,
        });
    }
    Ok(QuadratureResult::new(out.value, out.error, out.levels, out.nodes))
}

/// `log((1+x)/(1-x))` given `x` and `1 - x`, each accurate where it is small.
fn log_ratio(x: &Float, comp: &Float, wp: u32) -> Float {
    if *x < 0.5 {
        Float::with_val(wp, x.atanh_ref()) * 2u32
    } else {
        Float::with_val(wp, x.ln_1p_ref()) - Float::with_val(wp, comp.ln_ref())
    }
}

/// The integrand `(1/x) L^2 - 4 (1 - x^2)/x K^2` of the closing identity.
pub fn appendix_a_integrand(x: &Float) -> Result<Float> {
    let wp = x.prec();
    if *x <= 0 || *x >= 1 {
        return Err(Error::Domain("the identity integrand lives on (0, 1)".into()));
    }
    let comp = Float::with_val(wp, 1u32 - x);
    Ok(appendix_a_at(x, &comp, wp))
}

fn appendix_a_at(x: &Float, comp: &Float, wp: u32) -> Float {
    let l = log_ratio(x, comp, wp);
    let k = appendix_k(x, &l, wp);
    let one_m_x2 = Float::with_val(wp, x + 1u32) * comp;
    let a = Float::with_val(wp, l.square_ref()) / x;
    let b = Float::with_val(wp, k.square_ref()) * one_m_x2 * 4u32 / x;
    a - b
}

#[derive(Clone, Debug)]
pub struct AppendixAReport {
    pub integral: QuadratureResult,
    /// `|integral - 3|`.
    pub residual: Float,
}

/// `int_0^1 [(1/x) L^2 - 4 (1 - x^2)/x ((1 + x^2)/(2x) L - 1)^2] dx`, which
/// equals 3.
pub fn verify_appendix_a_identity(prec: &Precision) -> Result<AppendixAReport> {
    let integral = integrate_unit(prec, appendix_a_at)?;
    let residual = Float::with_val(prec.bits(), integral.value.value() - 3u32).abs();
    Ok(AppendixAReport { integral, residual })
}

/// One-dimensional reductions of the `n = 4` moments after the rotation
/// `x = x_1 + x_2`, `y = x_1 - x_2`: `int u K0^4 = (1/4) int L^2/x` and
/// `int u^3 K0^4 = (1/4) int (1 - x^2)/x K^2`.
pub fn reduced_n4(p: u32, prec: &Precision) -> Result<QuadratureResult> {
    let q = Rational::from((1, 4));
    let r = match p {
        1 => integrate_unit(prec, |x, c, wp| {
            let l = log_ratio(x, c, wp);
            Float::with_val(wp, l.square_ref()) / x
        })?,
        3 => integrate_unit(prec, |x, c, wp| {
            let l = log_ratio(x, c, wp);
            let k = appendix_k(x, &l, wp);
            Float::with_val(wp, k.square_ref()) * (Float::with_val(wp, x + 1u32) * c) / x
        })?,
        _ => return Err(Error::InvalidArgument(format!("reduced_n4 needs p in {{1, 3}}, got {p}"))),
    };
    Ok(r.scale(&q))
}

/// `int u I0 K0^3 = -(1/2) int_0^1 log(t)/(1 - t^2) dt`.
pub fn reduced_mixed_n3(prec: &Precision) -> Result<QuadratureResult> {
    let r = integrate_unit(prec, |t, c, wp| {
        let d = Float::with_val(wp, t + 1u32) * c;
        -Float::with_val(wp, t.ln_ref()) / d
    })?;
    Ok(r.scale(&Rational::from((1, 2))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{polygamma1, zeta};

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    fn br(a: i64, b: i64) -> BigReal {
        BigReal::from_rational(&q(a, b), 128)
    }

    #[test]
    fn sym_triple_examples() {
        let (u, v, w) = sym_triple_exact(&[q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        assert_eq!((u, v, w), (q(3, 1), q(3, 1), q(1, 1)));
        let (u, v, w) = sym_triple_exact(&[q(1, 1), q(2, 1)]).unwrap();
        assert_eq!((u, v, w), (q(3, 1), q(3, 1), q(2, 1)));
        let t = sym_triple(&[br(1, 1), br(2, 1)]).unwrap();
        assert_eq!(*t.v.value(), 3);
        assert!(sym_triple(&[]).is_err());
    }

    #[test]
    fn rational_integrand_oracles() {
        let raw = PeriodSpec::new(3, 1, Form::RawSimplex).unwrap();
        let mixed = PeriodSpec::new(3, 1, Form::MixedI0).unwrap();
        let a = [q(1, 4), q(1, 4)];
        assert_eq!(simplex_integrand_exact(&raw, &a).unwrap(), q(16, 5));
        assert_eq!(simplex_integrand_exact(&mixed, &a).unwrap(), q(32, 9));
        let b = [br(1, 4), br(1, 4)];
        let v = simplex_integrand(&raw, &b).unwrap();
        assert!(v.contains(&Float::with_val(128, &q(16, 5))));
    }

    #[test]
    fn boundary_points_rejected() {
        let raw = PeriodSpec::new(3, 1, Form::RawSimplex).unwrap();
        assert!(matches!(simplex_integrand_exact(&raw, &[q(0, 1), q(1, 2)]), Err(Error::Domain(_))));
        assert!(matches!(simplex_integrand_exact(&raw, &[q(1, 2), q(1, 2)]), Err(Error::Domain(_))));
        let log = PeriodSpec::new(4, 1, Form::LogKernel).unwrap();
        assert!(matches!(log_kernel_integrand(&log, &[br(1, 2), br(2, 3)]), Err(Error::Domain(_))));
        assert!(log_kernel_integrand(&log, &[br(1, 2)]).is_err());
        assert!(PeriodSpec::new(3, 3, Form::MixedI0).is_err());
        assert!(PeriodSpec::new(2, 1, Form::RawSimplex).is_err());
    }

    #[test]
    fn log_kernel_n3_reduces() {
        // 4 * log((1+x)/(1-x))/(1 + 3x^2), i.e. 2^2 times the reduced form
        let spec = PeriodSpec::new(3, 1, Form::LogKernel).unwrap();
        let x = Float::with_val(128, 0.3);
        let v = log_kernel_integrand(&spec, &[BigReal::exact(x.clone())]).unwrap();
        let l = Float::with_val(128, Float::with_val(128, &x + 1u32) / Float::with_val(128, 1u32 - &x)).ln();
        let expect = l * 4u32 / (Float::with_val(128, x.square_ref()) * 3u32 + 1u32);
        assert!(v.contains(&expect));
        let tiny = log_kernel_integrand(&spec, &[br(1, 1_000_000_000)]).unwrap();
        assert!(tiny.to_f64() > 0.0 && tiny.to_f64() < 1e-8);
    }

    #[test]
    fn cube_integrand_matches_point_form() {
        // s = (1/2, 1/3): a = (1/2, 1/6), Jacobian 1/2
        let spec = PeriodSpec::new(3, 3, Form::RawSimplex).unwrap();
        let wp = 128;
        let s = [Float::with_val(wp, 0.5), Float::with_val(wp, &q(1, 3))];
        let c = [Float::with_val(wp, 0.5), Float::with_val(wp, &q(2, 3))];
        let v = cube_integrand(&spec, &[&s[0], &s[1]], &[&c[0], &c[1]], wp);
        let direct = simplex_integrand_exact(&spec, &[q(1, 2), q(1, 6)]).unwrap() / 2u32;
        let d = Float::with_val(wp, v - Float::with_val(wp, &direct)).abs();
        assert!(d < 1e-35);
    }

    #[test]
    fn n3_log_kernel_to_40_digits() {
        let prec = Precision::digits(45);
        let spec = PeriodSpec::new(3, 1, Form::LogKernel).unwrap();
        let r = evaluate_period(&spec, &PeriodBudget::new(prec)).unwrap();
        assert!(r.certified);
        // (psi1(1/3) - psi1(2/3))/12 times 2^2
        let bits = prec.bits();
        let d = &polygamma1(&q(1, 3), &prec).unwrap() - &polygamma1(&q(2, 3), &prec).unwrap();
        let expect = Float::with_val(bits, d.value() / 3u32);
        let diff = Float::with_val(bits, r.result.value.value() - &expect).abs();
        assert!(diff < 1e-40, "{diff}");
    }

    #[test]
    fn n4_log_kernel_against_moments() {
        let prec = Precision::digits(15);
        for p in [1, 3] {
            let spec = PeriodSpec::new(4, p, Form::LogKernel).unwrap();
            let c = cross_check(&spec, &PeriodBudget::new(prec)).unwrap();
            assert!(c.agreeing_digits > 12.0, "p={p}: {}", c.agreeing_digits);
            assert!(c.within_error);
        }
    }

    #[test]
    fn simplex_and_log_kernel_agree() {
        let prec = Precision::digits(25);
        let budget = PeriodBudget::new(prec);
        let raw = evaluate_period(&PeriodSpec::new(3, 3, Form::RawSimplex).unwrap(), &budget).unwrap();
        let log = evaluate_period(&PeriodSpec::new(3, 3, Form::LogKernel).unwrap(), &budget).unwrap();
        assert!(raw.result.value.overlaps(&log.result.value));
        let d = Float::with_val(prec.bits(), raw.result.value.value() - log.result.value.value()).abs();
        assert!(d < 1e-24);
    }

    #[test]
    fn qmc_is_seeded_and_covers() {
        let spec = PeriodSpec::new(4, 3, Form::RawSimplex).unwrap();
        let mut budget = PeriodBudget::new(Precision::digits(15));
        budget.force_qmc = true;
        budget.qmc_points = 1 << 14;
        let a = evaluate_period(&spec, &budget).unwrap();
        let b = evaluate_period(&spec, &budget).unwrap();
        assert_eq!(a.result.value, b.result.value);
        assert_eq!(a.method, PeriodMethod::Qmc);
        assert!(!a.certified);
        let direct = spec.direct(&budget.prec).unwrap();
        assert!(a.result.value.overlaps(&direct.value));
    }

    #[test]
    fn appendix_identity() {
        let prec = Precision::digits(40);
        let r = verify_appendix_a_identity(&prec).unwrap();
        assert!(r.residual < 1e-35, "{}", r.residual);
        let x = Float::with_val(128, 0.5);
        let v = appendix_a_integrand(&x).unwrap();
        assert!(v > 0 && v.is_finite());
        let small = appendix_a_integrand(&Float::with_val(128, 1e-30)).unwrap();
        assert!(small.is_finite() && small.clone().abs() < 1e-20);
    }

    #[test]
    fn reduced_forms() {
        let prec = Precision::digits(30);
        let bits = prec.bits();
        let z3 = zeta(3, &prec).unwrap();
        let a = reduced_n4(1, &prec).unwrap();
        let expect = Float::with_val(bits, z3.value() * 7u32) / 8u32;
        assert!(Float::with_val(bits, a.value.value() - &expect).abs() < 1e-28);
        let b = reduced_n4(3, &prec).unwrap();
        // 4 a - 16 b = 3
        let lhs = Float::with_val(bits, a.value.value() * 4u32) - Float::with_val(bits, b.value.value() * 16u32);
        assert!(Float::with_val(bits, lhs - 3u32).abs() < 1e-27);
        let m = reduced_mixed_n3(&prec).unwrap();
        let z2 = zeta(2, &prec).unwrap();
        let expect = Float::with_val(bits, z2.value() * 3u32) / 8u32;
        assert!(Float::with_val(bits, m.value.value() - &expect).abs() < 1e-28);
    }
}
