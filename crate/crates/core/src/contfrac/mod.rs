//! Continued fractions for `zeta(2)`, `zeta(3)` and the trigamma difference,
//! their three-term recurrences, exact convergents and the higher-order
//! recursions of the moment families.

mod chain;
mod higher;
pub mod poly;

use rug::float::Round;
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::real::{BigReal, Precision};
use crate::specfun::{trigamma_third_difference, zeta};

pub use chain::{z_chain_from_moments, ChainReport, Mobius};
pub use higher::{
    higher_order_recurrence, published_recurrence, reduced_two_step, reduced_two_step_eigenvalues,
    tilde_rescaling_check, HigherOrderReport, TildeCheck,
};
pub use poly::{IntPoly, QPoly, RatFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Proved,
    PslqConjectural,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Proved => "proved",
            Provenance::PslqConjectural => "pslq_conjectural",
        })
    }
}

/// Atoms of a closed-form target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constant {
    One,
    InvZeta2,
    InvZeta3,
    /// `1/(psi_1(1/3) - psi_1(2/3))`
    InvPsi1Diff,
}

impl Constant {
    pub fn evaluate(&self, prec: &Precision) -> Result<BigReal> {
        let bits = prec.bits();
        Ok(match self {
            Constant::One => BigReal::exact(Float::with_val(bits, 1)),
            Constant::InvZeta2 => zeta(2, prec)?.recip(),
            Constant::InvZeta3 => zeta(3, prec)?.recip(),
            Constant::InvPsi1Diff => trigamma_third_difference(prec).recip(),
        })
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Constant::One => "1",
            Constant::InvZeta2 => "1/zeta(2)",
            Constant::InvZeta3 => "1/zeta(3)",
            Constant::InvPsi1Diff => "1/(psi1(1/3)-psi1(2/3))",
        }
    }
}

/// Rational combination of [`Constant`]s, kept symbolic until evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub terms: Vec<(Rational, Constant)>,
}

impl ClosedForm {
    pub fn new(terms: &[((i64, i64), Constant)]) -> Self {
        ClosedForm {
            terms: terms.iter().map(|&(q, c)| (Rational::from(q), c)).collect(),
        }
    }

    pub fn evaluate(&self, prec: &Precision) -> Result<BigReal> {
        let mut acc = BigReal::exact(Float::with_val(prec.bits(), 0));
        for (q, c) in &self.terms {
            acc = &acc + &c.evaluate(prec)?.mul_rational(q);
        }
        Ok(acc)
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (q, c)) in self.terms.iter().enumerate() {
            let neg = *q < 0;
            let a = Rational::from(q.abs_ref());
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            match c {
                Constant::One => write!(f, "{a}")?,
                _ => write!(f, "{a}*{}", c.symbol())?,
            }
        }
        Ok(())
    }
}

impl Serialize for ClosedForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            coeff: String,
            constant: &'a Constant,
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(q, c)| Term {
                coeff: q.to_string(),
                constant: c,
            })
            .collect();
        let mut st = s.serialize_struct("ClosedForm", 2)?;
        st.serialize_field("sum", &terms)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

/// `z(s) = N(s+1)/(D(s+1) + N(s+2)/(D(s+2) + ...))` with `D = denominator/divisor`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContFracSpec {
    pub name: String,
    pub numerator: IntPoly,
    pub denominator: IntPoly,
    pub divisor: u32,
    pub start_k: i64,
    pub target: ClosedForm,
    pub provenance: Provenance,
}

impl ContFracSpec {
    fn n_at(&self, k: i64) -> Rational {
        Rational::from(self.numerator.eval_i64(k))
    }

    fn d_at(&self, k: i64) -> Rational {
        Rational::from((self.denominator.eval_i64(k), self.divisor))
    }

    /// Paired recurrence `y(k+1) - D(k) y(k) - N(k) y(k-1) = 0`.
    pub fn recurrence(&self) -> ThreeTermRecurrence {
        ThreeTermRecurrence {
            b: self.denominator.clone(),
            b_divisor: self.divisor,
            a: -&self.numerator,
            start_k: self.start_k,
            init_num: (Rational::from(1), Rational::new()),
            init_den: (Rational::new(), Rational::from(1)),
        }
    }

    /// Degree `d` of `D`; `N` has degree at most `2d`.
    pub fn degree(&self) -> usize {
        self.denominator.degree().unwrap_or(0)
    }
}

fn cf(
    name: &str,
    num: IntPoly,
    den: IntPoly,
    divisor: u32,
    target: ClosedForm,
    provenance: Provenance,
) -> ContFracSpec {
    ContFracSpec {
        name: name.into(),
        numerator: num,
        denominator: den,
        divisor,
        start_k: 0,
        target,
        provenance,
    }
}

/// The nine continued fractions, in a fixed order.
pub fn catalog() -> Vec<ContFracSpec> {
    use Constant::*;
    use Provenance::*;
    let k4 = IntPoly::from_i64(&[0, 0, 0, 0, 1]);
    let k6 = IntPoly::from_i64(&[0, 0, 0, 0, 0, 0, 1]);
    let odd = [1i64, 2];
    vec![
        cf(
            "zeta2_a",
            k4.clone(),
            IntPoly::from_i64(&[3, 11, 11]),
            1,
            ClosedForm::new(&[((5, 1), InvZeta2), ((-3, 1), One)]),
            Proved,
        ),
        cf(
            "zeta2_b",
            k4.scale(8),
            IntPoly::from_i64(&[2, 7, 7]),
            1,
            ClosedForm::new(&[((4, 1), InvZeta2), ((-2, 1), One)]),
            Proved,
        ),
        cf(
            "zeta2_c",
            &k4 * &IntPoly::product(&[&[1, 4], &[-1, 4]]),
            IntPoly::product(&[&odd, &[1, 3, 3]]),
            1,
            ClosedForm::new(&[((5, 2), InvZeta2), ((-1, 1), One)]),
            Proved,
        ),
        cf(
            "zeta2_pslq",
            &k4.scale(3) * &IntPoly::product(&[&[1, 3], &[-1, 3]]),
            IntPoly::product(&[&odd, &[4, 13, 13]]),
            1,
            ClosedForm::new(&[((7, 1), InvZeta2), ((-4, 1), One)]),
            PslqConjectural,
        ),
        cf(
            "psi1_kappa3",
            k4.scale(-9),
            IntPoly::from_i64(&[3, 10, 10]),
            1,
            ClosedForm::new(&[((18, 1), InvPsi1Diff), ((-3, 1), One)]),
            Proved,
        ),
        cf(
            "zeta3_apery",
            k6.scale(-1),
            IntPoly::product(&[&odd, &[5, 17, 17]]),
            1,
            ClosedForm::new(&[((6, 1), InvZeta3), ((-5, 1), One)]),
            Proved,
        ),
        cf(
            "zeta3_pslq",
            k6.scale(-1),
            IntPoly::product(&[&odd, &[1, 3, 3]]),
            1,
            ClosedForm::new(&[((8, 7), InvZeta3), ((-1, 1), One)]),
            PslqConjectural,
        ),
        cf(
            "zeta3_kappa4_half",
            k6.scale(-4),
            IntPoly::product(&[&odd, &[2, 5, 5]]),
            2,
            ClosedForm::new(&[((6, 7), InvZeta3), ((-1, 1), One)]),
            Proved,
        ),
        cf(
            "zeta3_kappa4",
            k6.scale(-16),
            IntPoly::product(&[&odd, &[2, 5, 5]]),
            1,
            ClosedForm::new(&[((12, 7), InvZeta3), ((-2, 1), One)]),
            Proved,
        ),
    ]
}

/// Catalog entry by name.
pub fn catalog_entry(name: &str) -> Result<ContFracSpec> {
    catalog()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no continued fraction named {name:?}")))
}

fn backward(spec: &ContFracSpec, depth: u32, bits: u32) -> Result<Float> {
    let s = spec.start_k;
    let mut z = Float::new(bits);
    for k in (s + 1..=s + depth as i64).rev() {
        let d = Float::with_val(bits, &spec.d_at(k)) + &z;
        if d.is_zero() {
            return Err(Error::Evaluation(format!(
                "{}: vanishing denominator D(k) + z(k) at k = {k}",
                spec.name
            )));
        }
        z = Float::with_val(bits, spec.numerator.eval_i64(k)) / d;
    }
    Ok(z)
}

/// `z(start_k)` from the tail `z(start_k + depth) = 0`. The radius is the
/// difference to depth `depth - 5`.
pub fn cf_value(spec: &ContFracSpec, depth: u32, prec: &Precision) -> Result<BigReal> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let bits = prec.bits() + 32;
    let z = backward(spec, depth, bits)?;
    let z_short = backward(spec, depth.saturating_sub(5).max(1), bits)?;
    let diff = Float::with_val(bits, &z - &z_short).abs();
    let z = Float::with_val(prec.bits(), &z);
    let (r, _) = Float::with_val_round(64, &diff, Round::Up);
    Ok(BigReal::rounded(z).widen(&r))
}

/// Exact rational value of the depth-`depth` truncation.
pub fn cf_exact(spec: &ContFracSpec, depth: u32) -> Result<Rational> {
    let s = spec.start_k;
    let mut z = Rational::new();
    for k in (s + 1..=s + depth as i64).rev() {
        let d = spec.d_at(k) + &z;
        if d == 0 {
            return Err(Error::Evaluation(format!(
                "{}: vanishing denominator D(k) + z(k) at k = {k}",
                spec.name
            )));
        }
        z = spec.n_at(k) / d;
    }
    Ok(z)
}

/// `y(k+1) - (B(k)/b_divisor) y(k) + A(k) y(k-1) = 0`, run twice from
/// `(y(start_k), y(start_k+1))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeTermRecurrence {
    pub b: IntPoly,
    pub b_divisor: u32,
    pub a: IntPoly,
    pub start_k: i64,
    #[serde(serialize_with = "ser_pair")]
    pub init_num: (Rational, Rational),
    #[serde(serialize_with = "ser_pair")]
    pub init_den: (Rational, Rational),
}

fn ser_pair<S: Serializer>(p: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
    [p.0.to_string(), p.1.to_string()].serialize(s)
}

impl ThreeTermRecurrence {
    pub fn with_initial(
        mut self,
        start_k: i64,
        num: (i64, i64),
        den: (i64, i64),
    ) -> ThreeTermRecurrence {
        self.start_k = start_k;
        self.init_num = (Rational::from(num.0), Rational::from(num.1));
        self.init_den = (Rational::from(den.0), Rational::from(den.1));
        self
    }

    /// Sequence `y(start_k), ..., y(k_max)` from one initial pair.
    pub fn run(&self, init: &(Rational, Rational), k_max: i64) -> Vec<Rational> {
        let s = self.start_k;
        let mut ys = vec![init.0.clone(), init.1.clone()];
        for k in s + 1..k_max {
            let i = (k - s) as usize;
            let b = Rational::from((self.b.eval_i64(k), self.b_divisor));
            let a = Rational::from(self.a.eval_i64(k));
            let next = b * &ys[i] - a * &ys[i - 1];
            ys.push(next);
        }
        ys.truncate((k_max - s + 1).max(0) as usize);
        ys
    }
}

/// Exact paired sequences of a recurrence.
#[derive(Clone, Debug, Serialize)]
pub struct Convergents {
    pub start_k: i64,
    #[serde(serialize_with = "ser_seq")]
    pub num: Vec<Rational>,
    #[serde(serialize_with = "ser_seq")]
    pub den: Vec<Rational>,
}

fn ser_seq<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|q| q.to_string()).collect::<Vec<_>>().serialize(s)
}

impl Convergents {
    pub fn k_max(&self) -> i64 {
        self.start_k + self.num.len() as i64 - 1
    }

    /// `num(k)/den(k)`, or `None` when the denominator vanishes.
    pub fn ratio(&self, k: i64) -> Option<Rational> {
        let i = usize::try_from(k - self.start_k).ok()?;
        let d = self.den.get(i)?;
        if *d == 0 {
            None
        } else {
            Some(Rational::from(&self.num[i] / d))
        }
    }

    pub fn ratio_float(&self, k: i64, bits: u32) -> Option<Float> {
        self.ratio(k).map(|q| Float::with_val(bits, &q))
    }

    /// Each pair `(p(k), q(k))` divided by its content, so numerator and
    /// denominator become coprime integers. Ratios are unchanged.
    pub fn normalized(&self) -> Convergents {
        let (num, den) = self
            .num
            .iter()
            .zip(&self.den)
            .map(|(p, q)| {
                let g = Integer::from(p.numer().gcd_ref(q.numer()));
                if g == 0 {
                    return (p.clone(), q.clone());
                }
                let l = Integer::from(p.denom().lcm_ref(q.denom()));
                let c = Rational::from((g, l));
                (Rational::from(p / &c), Rational::from(q / &c))
            })
            .unzip();
        Convergents {
            start_k: self.start_k,
            num,
            den,
        }
    }
}

pub fn convergents(rec: &ThreeTermRecurrence, k_max: i64) -> Result<Convergents> {
    if k_max < rec.start_k + 2 {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} must be at least start_k + 2 = {}",
            rec.start_k + 2
        )));
    }
    Ok(Convergents {
        start_k: rec.start_k,
        num: rec.run(&rec.init_num, k_max),
        den: rec.run(&rec.init_den, k_max),
    })
}

/// Roots of `y^2 - b y + a` where `b`, `a` are the leading behaviours of the
/// middle and trailing coefficients, largest modulus first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharRoots {
    pub dominant: f64,
    pub subdominant: f64,
}

pub fn characteristic_roots(spec: &ContFracSpec) -> CharRoots {
    let d = spec.degree();
    let b = spec.denominator.leading().to_f64() / spec.divisor as f64;
    let a = if spec.numerator.degree() == Some(2 * d) {
        -spec.numerator.leading().to_f64()
    } else {
        0.0
    };
    let disc = (b * b - 4.0 * a).sqrt();
    let (r1, r2) = ((b + disc) / 2.0, (b - disc) / 2.0);
    if r1.abs() >= r2.abs() {
        CharRoots { dominant: r1, subdominant: r2 }
    } else {
        CharRoots { dominant: r2, subdominant: r1 }
    }
}

/// Two Richardson passes on `f(k/4), f(k/2), f(k)` for an `O(1/k)` sequence.
fn richardson(f0: f64, f1: f64, f2: f64) -> f64 {
    let r1 = 2.0 * f1 - f0;
    let r2 = 2.0 * f2 - f1;
    (4.0 * r2 - r1) / 3.0
}

/// Dominant root from `q(k+1)/(q(k) k^d)` of the exact denominators.
pub fn empirical_dominant_root(spec: &ContFracSpec, k_max: i64) -> Result<f64> {
    if k_max < 8 {
        return Err(Error::InvalidArgument("k_max must be at least 8".into()));
    }
    let rec = spec.recurrence();
    let q = rec.run(&rec.init_den, k_max + 1);
    let d = spec.degree() as i32;
    let at = |k: i64| -> f64 {
        let i = (k - spec.start_k) as usize;
        let r = Rational::from(&q[i + 1] / &q[i]);
        Float::with_val(128, &r).to_f64() / (k as f64).powi(d)
    };
    Ok(richardson(at(k_max / 4), at(k_max / 2), at(k_max)))
}

/// Subdominant root from the tail of the continued fraction, `-z(k)/k^d`.
pub fn empirical_subdominant_root(spec: &ContFracSpec, k_max: i64) -> Result<f64> {
    if k_max < 8 {
        return Err(Error::InvalidArgument("k_max must be at least 8".into()));
    }
    let d = spec.degree() as i32;
    let at = |k: i64| -> Result<f64> {
        let mut shifted = spec.clone();
        shifted.start_k = k;
        let z = backward(&shifted, 400, 192)?;
        Ok(-z.to_f64() / (k as f64).powi(d))
    };
    Ok(richardson(at(k_max / 4)?, at(k_max / 2)?, at(k_max)?))
}

/// Empirical irrationality-measure slope of a convergent sequence.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    /// `delta` in `|target - p/q| ~ q^(-delta)` over reduced fractions.
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square deviation of the fit in natural log units.
    pub rms_residual: f64,
    pub points: usize,
    /// `slope > 1`: the approximations beat the trivial rate `1/q`.
    pub beats_trivial: bool,
}

/// Least-squares fit of `log|target - p_k/q_k|` against `log q_k` over
/// `k_max/2 <= k <= k_max`, with `p_k/q_k` reduced to lowest terms.
pub fn convergence_exponent(
    conv: &Convergents,
    target: &Float,
) -> Result<ExponentFit> {
    let k_max = conv.k_max();
    if k_max - conv.start_k < 10 {
        return Err(Error::InvalidArgument("need at least 10 convergents".into()));
    }
    let bits = target.prec();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in (k_max / 2).max(conv.start_k + 2)..=k_max {
        let Some(r) = conv.ratio(k) else { continue };
        let err = Float::with_val(bits, target - &r).abs();
        if err.is_zero() {
            continue;
        }
        let lq = Float::with_val(64, r.denom()).ln().to_f64();
        let le = err.ln().to_f64();
        if lq > 0.0 && le.is_finite() {
            xs.push(lq);
            ys.push(le);
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Evaluation("degenerate fit: fewer than three usable points".into()));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Evaluation("degenerate fit: constant denominators".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    Ok(ExponentFit {
        slope: -b,
        intercept: a,
        rms_residual: rms,
        points: n,
        beats_trivial: -b > 1.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AperyVariant {
    Zu1,
    Zu2,
}

/// Closed-form solutions of the `zeta3_pslq` (zu1) and `zeta3_kappa4` (zu2)
/// recurrences with initial data `{1, 1}` and `{1, 2}`.
pub fn apery_closed_forms(k: u32, variant: AperyVariant) -> Rational {
    let kk = Integer::from(k);
    let mut s = Integer::new();
    for i in 0..=k {
        let cki = Integer::from(kk.binomial_ref(i));
        let t = match variant {
            AperyVariant::Zu1 => {
                let c = Integer::from(Integer::from(2 * i).binomial_ref(k));
                Integer::from(cki.square_ref()) * c.square()
            }
            AperyVariant::Zu2 => {
                Integer::from(cki.square_ref())
                    * Integer::from(Integer::from(2 * i).binomial_ref(i))
                    * Integer::from(Integer::from(2 * (k - i)).binomial_ref(k - i))
            }
        };
        s += t;
    }
    let f = Integer::from(Integer::factorial(k));
    let f3 = Integer::from(f.square_ref()) * &f;
    let shift = match variant {
        AperyVariant::Zu1 => 2 * k,
        AperyVariant::Zu2 => k,
    };
    Rational::from((s * f3, Integer::from(1) << shift))
}
