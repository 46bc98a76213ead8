use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use zetalab::contfrac::{
    catalog, catalog_entry, cf_value, characteristic_roots, convergents, empirical_dominant_root,
    empirical_subdominant_root, z_chain_from_moments, Provenance,
};
use zetalab::momentalg::{decompose, MomentIndex};
use zetalab::periods::{cross_check, Form, PeriodBudget, PeriodSpec};
use zetalab::quadrature::{factorial, large_n_limits, moment, normalized_moment, BesselProduct};
use zetalab::relation::{pslq, PslqOutcome, RelationProblem};
use zetalab::specfun::{trigamma_third_difference, zeta};
use zetalab::{BigReal, Error, Precision, Result};

use crate::num;
use crate::report::{Report, Table};
use crate::Context;

/// Which moment: the normalized `I_{n,j}^(kappa)` or a raw product.
#[derive(Clone, Copy, Debug)]
pub enum MomentFamily {
    Normalized { kappa: u32, n: u32, j: u32 },
    Raw(BesselProduct),
}

impl MomentFamily {
    fn key(&self) -> String {
        match self {
            MomentFamily::Normalized { kappa, n, j } => format!("moment kappa={kappa} n={n} j={j}"),
            MomentFamily::Raw(f) => format!("moment p={} a={} b={} c={} d={}", f.p, f.a, f.b, f.c, f.d),
        }
    }

    fn label(&self) -> String {
        match self {
            MomentFamily::Normalized { kappa, n, j } => format!("I_{{{n},{j}}}^({kappa})"),
            MomentFamily::Raw(f) => format!("int {f} du"),
        }
    }
}

/// Rational combination of named constants.
struct Closed {
    terms: Vec<(Rational, Atom)>,
}

#[derive(Clone, Copy)]
enum Atom {
    One,
    Pi,
    Zeta2,
    Zeta3,
    Psi1Diff,
}

impl Atom {
    fn symbol(self) -> &'static str {
        match self {
            Atom::One => "1",
            Atom::Pi => "pi",
            Atom::Zeta2 => "zeta(2)",
            Atom::Zeta3 => "zeta(3)",
            Atom::Psi1Diff => "(psi1(1/3)-psi1(2/3))",
        }
    }

    fn value(self, prec: &Precision) -> Result<BigReal> {
        let bits = prec.bits();
        Ok(match self {
            Atom::One => BigReal::exact(Float::with_val(bits, 1)),
            Atom::Pi => BigReal::rounded(Float::with_val(bits, rug::float::Constant::Pi)),
            Atom::Zeta2 => zeta(2, prec)?,
            Atom::Zeta3 => zeta(3, prec)?,
            Atom::Psi1Diff => trigamma_third_difference(prec),
        })
    }
}

impl Closed {
    fn new(terms: Vec<(Rational, Atom)>) -> Self {
        Closed {
            terms: terms.into_iter().filter(|(q, _)| *q != 0).collect(),
        }
    }

    fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (q, a)) in self.terms.iter().enumerate() {
            let t = num::term(&Rational::from(q.abs_ref()), a.symbol());
            match (i, *q < 0) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&t);
        }
        s
    }

    fn value(&self, prec: &Precision) -> Result<BigReal> {
        let mut acc = BigReal::exact(Float::with_val(prec.bits(), 0));
        for (q, a) in &self.terms {
            acc = &acc + &a.value(prec)?.mul_rational(q);
        }
        Ok(acc)
    }
}

/// Known closed form of a moment: a short table plus every even-parity
/// moment of weight at most 4 through its exact basis decomposition.
fn closed_form(fam: &MomentFamily) -> Option<Closed> {
    let q = |a: i64, b: i64| Rational::from((a, b));
    let (kappa, n, j, scale) = match *fam {
        MomentFamily::Normalized { kappa, n, j } => (kappa, n, j, Rational::from(1)),
        MomentFamily::Raw(f) => {
            match (f.p, f.a, f.b, f.c, f.d) {
                (0, 1, 0, 0, 0) => return Some(Closed::new(vec![(q(1, 2), Atom::Pi)])),
                (0, 2, 0, 0, 0) => return Some(Closed::new(vec![(q(3, 2), Atom::Zeta2)])),
                (1, 3, 0, 1, 0) => return Some(Closed::new(vec![(q(3, 8), Atom::Zeta2)])),
                _ => {}
            }
            if f.p == 0 || f.c != 0 || f.d != 0 {
                return None;
            }
            let n = f.p - 1;
            (f.a + f.b, n, f.b, Rational::from(factorial(n)))
        }
    };
    if kappa > 4 {
        return None;
    }
    let d = decompose(&MomentIndex::new(kappa, n, j).ok()?).ok()?.scaled(&scale);
    let mut terms = vec![(d.coeff_one.clone(), Atom::One)];
    match kappa {
        // int u K0^3 = (psi1(1/3) - psi1(2/3))/12, int u K0^4 = 7 zeta(3)/8
        3 => terms.push((d.coeff(1) / Rational::from(12), Atom::Psi1Diff)),
        4 => terms.push((d.coeff(1) * q(7, 8), Atom::Zeta3)),
        _ => {}
    }
    Some(Closed::new(terms))
}

#[derive(Serialize, Deserialize)]
struct MomentRaw {
    value: String,
    radius: String,
}

pub fn moment_cmd(ctx: &mut Context, fam: MomentFamily, digits: u32) -> Result<Report> {
    let key = fam.key();
    let raw: MomentRaw = ctx.cached(&key, digits, || {
        let prec = Precision::digits(digits);
        let r = match fam {
            MomentFamily::Normalized { kappa, n, j } => normalized_moment(kappa, n, j, &prec)?,
            MomentFamily::Raw(f) => moment(&f, &prec)?,
        };
        Ok(MomentRaw {
            value: num::full(&r.value),
            radius: r.value.radius_string(),
        })
    })?;
    let mut rep = Report::new("moment", Some(digits));
    rep.set("integral", fam.label());
    rep.set("value", num::round(&raw.value, digits)?);
    let radius = num::parse(&raw.radius, 10)?;
    rep.set("error", num::bound(&radius, digits));
    if let Some(cf) = closed_form(&fam) {
        let prec = Precision::digits(digits);
        let x = num::parse(&raw.value, digits)?;
        let c = cf.value(&prec)?;
        let diff = Float::with_val(prec.bits(), &x - c.value()).abs() + &radius + c.radius();
        rep.set("closed_form", cf.render());
        rep.set("residual", num::bound(&diff, digits));
        rep.set("provenance", Provenance::Proved.to_string());
    }
    Ok(rep)
}

pub fn decompose_cmd(kappa: u32, n: u32, j: u32) -> Result<Report> {
    let d = decompose(&MomentIndex::new(kappa, n, j)?)?;
    let mut rep = Report::new("decompose", None);
    rep.set("kappa", kappa).set("n", n).set("j", j);
    rep.set("one", d.coeff_one.to_string());
    let basis: Map<String, Value> = d
        .coeffs
        .iter()
        .map(|(m, c)| (format!("m{m}"), Value::from(c.to_string())))
        .collect();
    rep.set("basis", Value::Object(basis));
    rep.set("expression", d.to_string());
    rep.set("provenance", Provenance::Proved.to_string());
    Ok(rep)
}

pub fn cf_list() -> Result<Report> {
    let mut rep = Report::new("cf list", None);
    let mut t = Table::new(&["name", "numerator", "denominator", "divisor", "start_k", "target", "provenance"]);
    for c in catalog() {
        t.push(vec![
            c.name.clone(),
            c.numerator.to_string(),
            c.denominator.to_string(),
            c.divisor.to_string(),
            c.start_k.to_string(),
            c.target.to_string(),
            c.provenance.to_string(),
        ]);
    }
    rep.table = Some(t);
    Ok(rep)
}

pub fn cf_eval(name: &str, depth: u32, digits: u32) -> Result<Report> {
    let spec = catalog_entry(name)?;
    let prec = Precision::digits(digits);
    let v = cf_value(&spec, depth, &prec)?;
    let t = spec.target.evaluate(&prec)?;
    let diff = Float::with_val(prec.bits(), v.value() - t.value()).abs();
    let mut rep = Report::new("cf eval", Some(digits));
    rep.set("name", name).set("depth", depth);
    rep.set("value", v.to_decimal(digits as usize));
    rep.set("target", spec.target.to_string());
    rep.set("target_value", t.to_decimal(digits as usize));
    rep.set("difference", num::bound(&diff, digits));
    rep.set("agreeing_digits", num::agreeing_digits(v.value(), t.value(), digits));
    rep.set("provenance", spec.provenance.to_string());
    Ok(rep)
}

pub fn cf_convergents(
    name: &str,
    k_max: i64,
    init: Option<((i64, i64), (i64, i64))>,
    against: Option<&str>,
    normalize: bool,
    digits: u32,
) -> Result<Report> {
    let spec = catalog_entry(name)?;
    let prec = Precision::digits(digits);
    let mut rec = spec.recurrence();
    if let Some((num_init, den_init)) = init {
        rec = rec.with_initial(spec.start_k, num_init, den_init);
    }
    let mut conv = convergents(&rec, k_max)?;
    if normalize {
        conv = conv.normalized();
    }
    // with the default initial data the ratios converge to the fraction itself
    let target = match (against, init) {
        (Some(a), _) => Some(num::named(a, &prec)?.ok_or_else(|| Error::InvalidArgument(format!("unknown constant {a}")))?),
        (None, None) => Some(spec.target.evaluate(&prec)?),
        (None, Some(_)) => None,
    };
    let mut rep = Report::new("cf convergents", Some(digits));
    rep.set("name", name).set("k_max", k_max).set("normalized", normalize);
    rep.set("init_num", vec![rec.init_num.0.to_string(), rec.init_num.1.to_string()]);
    rep.set("init_den", vec![rec.init_den.0.to_string(), rec.init_den.1.to_string()]);
    let roots = characteristic_roots(&spec);
    rep.set("dominant_root", format!("{:.6}", roots.dominant));
    rep.set("subdominant_root", format!("{:.6}", roots.subdominant));
    if k_max >= 8 {
        rep.set("empirical_dominant_root", format!("{:.6}", empirical_dominant_root(&spec, k_max)?));
        rep.set("empirical_subdominant_root", format!("{:.6}", empirical_subdominant_root(&spec, k_max)?));
    }
    let mut t = Table::new(&["k", "numerator", "denominator", "ratio", "difference"]);
    for (i, (p, q)) in conv.num.iter().zip(&conv.den).enumerate() {
        let k = conv.start_k + i as i64;
        let (ratio, diff) = match conv.ratio_float(k, prec.bits()) {
            Some(r) => {
                let d = target.as_ref().map_or(String::new(), |t| {
                    let d = Float::with_val(prec.bits(), &r - t.value()).abs();
                    zetalab::real::format_decimal(&d, 3)
                });
                (zetalab::real::format_decimal(&r, digits as usize), d)
            }
            None => (String::new(), String::new()),
        };
        t.push(vec![k.to_string(), p.to_string(), q.to_string(), ratio, diff]);
    }
    rep.table = Some(t);
    Ok(rep)
}

pub fn cf_chain(kappa: u32, digits: u32) -> Result<Report> {
    let prec = Precision::digits(digits);
    let c = z_chain_from_moments(kappa, &prec)?;
    let mut rep = Report::new("cf chain", Some(digits));
    rep.set("kappa", kappa).set("start_k", c.start_k);
    rep.set("fraction", c.fraction.clone());
    rep.set("z_start", c.z_start.to_string());
    rep.set("z0", c.z0.to_string());
    rep.set("z0_expected", c.z0_expected.to_string());
    rep.set("z0_value", c.z0_value.to_decimal(digits as usize));
    rep.set("target_value", c.target_value.to_decimal(digits as usize));
    rep.set("provenance", Provenance::Proved.to_string());
    rep.passed = Some(c.closed_form_ok);
    Ok(rep)
}

pub fn pslq_cmd(
    values: &[String],
    labels: Option<Vec<String>>,
    max_coeff: &str,
    confidence: Option<u32>,
    digits: u32,
) -> Result<Report> {
    let prec = Precision::digits(digits);
    let xs: Vec<BigReal> = values.iter().map(|s| num::value_arg(s, &prec)).collect::<Result<_>>()?;
    let labels = match labels {
        Some(l) if l.len() == xs.len() => l,
        Some(l) => {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} values",
                l.len(),
                xs.len()
            )))
        }
        None => values.to_vec(),
    };
    let conf = confidence.unwrap_or(digits.saturating_sub(10));
    let problem = RelationProblem::new(xs, labels.clone(), num::integer_arg(max_coeff)?, conf);
    let out = pslq(&problem)?;
    let mut rep = Report::new("pslq", Some(digits));
    rep.set("labels", labels.clone()).set("confidence_digits", conf);
    match &out {
        PslqOutcome::Relation(r) => {
            rep.set("coefficients", r.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>());
            rep.set("relation", relation_string(&r.coefficients, &labels));
            rep.set("residual", num::bound(&Float::with_val(64, r.residual.value() + r.residual.radius()), digits));
            rep.set("iterations", r.iterations);
            rep.set("provenance", Provenance::PslqConjectural.to_string());
        }
        PslqOutcome::NoRelation { norm_bound, iterations } => {
            rep.set("coefficients", Value::Null);
            rep.set("norm_bound", zetalab::real::format_decimal(norm_bound, 6));
            rep.set("iterations", *iterations);
        }
    }
    Ok(rep)
}

fn relation_string(c: &[Integer], labels: &[String]) -> String {
    let mut s = String::new();
    for (a, l) in c.iter().zip(labels) {
        if *a == 0 {
            continue;
        }
        let mag = Integer::from(a.abs_ref());
        let sign = if *a < 0 { "-" } else { "+" };
        if s.is_empty() {
            if *a < 0 {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(&format!("{mag}*{l}"));
    }
    s.push_str(" = 0");
    s
}

#[derive(Serialize, Deserialize)]
struct PeriodRaw {
    value: String,
    error: String,
    method: String,
    certified: bool,
    direct: String,
    direct_error: String,
    dimension: usize,
    normalization: String,
    nodes: usize,
}

pub struct PeriodArgs {
    pub n: u32,
    pub p: u32,
    pub form: String,
    pub digits: u32,
    pub seed: u64,
    pub qmc_points: u64,
    pub force_qmc: bool,
}

pub fn period_cmd(ctx: &mut Context, a: &PeriodArgs) -> Result<Report> {
    let form: Form = a.form.parse()?;
    let spec = PeriodSpec::new(a.n, a.p, form)?;
    let key = format!(
        "period n={} p={} form={} seed={} points={} qmc={}",
        a.n, a.p, form, a.seed, a.qmc_points, a.force_qmc
    );
    let digits = a.digits;
    let raw: PeriodRaw = ctx.cached(&key, digits, || {
        let mut budget = PeriodBudget::new(Precision::digits(digits));
        budget.seed = a.seed;
        budget.qmc_points = a.qmc_points;
        budget.force_qmc = a.force_qmc;
        let c = cross_check(&spec, &budget)?;
        Ok(PeriodRaw {
            value: num::full(&c.period.result.value),
            error: zetalab::real::format_decimal(&c.period.result.error_estimate, 3),
            method: serde_json::to_value(c.period.method)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            certified: c.period.certified,
            direct: num::full(&c.direct.value),
            direct_error: zetalab::real::format_decimal(&c.direct.error_estimate, 3),
            dimension: spec.dimension(),
            normalization: spec.normalization().to_string(),
            nodes: c.period.result.nodes,
        })
    })?;
    let value = num::parse(&raw.value, digits)?;
    let err = num::parse(&raw.error, 10)?;
    let direct = num::parse(&raw.direct, digits)?;
    let direct_err = num::parse(&raw.direct_error, 10)?;
    // digits justified by the error bar, plus one
    let shown = if value.is_zero() {
        digits
    } else {
        let rel = Float::with_val(64, &err / &value);
        (num::neg_log10(&rel, digits).floor() as i64 + 1).clamp(1, i64::from(digits)) as u32
    };
    let diff = Float::with_val(value.prec(), &value - &direct).abs();
    let within = diff <= Float::with_val(64, &err + &direct_err);
    let mut rep = Report::new("period", Some(digits));
    rep.set("spec", spec.to_string());
    rep.set("method", raw.method.clone()).set("certified", raw.certified);
    rep.set("dimension", raw.dimension).set("normalization", raw.normalization.clone());
    rep.set("value", zetalab::real::format_decimal(&value, shown as usize));
    // statistical error bars are shown as they are, certified ones as bounds
    let err_text = if raw.certified {
        num::bound(&err, digits)
    } else {
        zetalab::real::format_decimal(&err, 3)
    };
    rep.set("error", err_text);
    rep.set("direct", zetalab::real::format_decimal(&direct, digits as usize));
    rep.set("agreeing_digits", num::agreeing_digits(&value, &direct, digits));
    rep.set("within_error", within);
    if raw.method == "qmc" {
        rep.set("seed", a.seed).set("qmc_points", a.qmc_points);
    }
    Ok(rep)
}

#[derive(Serialize, Deserialize)]
struct LimitsRaw {
    rows: Vec<(u32, String, String)>,
    weighted_limit: String,
    plain_limit: String,
    monotone: bool,
}

pub fn limits_cmd(ctx: &mut Context, n_max: u32, digits: u32) -> Result<Report> {
    let key = format!("limits n_max={n_max}");
    let raw: LimitsRaw = ctx.cached(&key, digits, || {
        let l = large_n_limits(n_max, &Precision::digits(digits))?;
        Ok(LimitsRaw {
            rows: l.rows.iter().map(|r| (r.n, num::full(&r.weighted), num::full(&r.plain))).collect(),
            weighted_limit: num::full(&l.weighted_limit),
            plain_limit: num::full(&l.plain_limit),
            monotone: l.monotone,
        })
    })?;
    let wl = num::parse(&raw.weighted_limit, digits)?;
    let pl = num::parse(&raw.plain_limit, digits)?;
    let mut rep = Report::new("limits", Some(digits));
    rep.set("n_max", n_max);
    rep.set("weighted_limit", zetalab::real::format_decimal(&wl, digits as usize));
    rep.set("weighted_limit_closed_form", "exp(2*psi0(1))");
    rep.set("plain_limit", zetalab::real::format_decimal(&pl, digits as usize));
    rep.set("plain_limit_closed_form", "2*exp(psi0(1))");
    rep.set("monotone", raw.monotone);
    let mut t = Table::new(&["n", "weighted", "weighted_gap", "plain", "plain_gap"]);
    for (n, w, p) in &raw.rows {
        let w = num::parse(w, digits)?;
        let p = num::parse(p, digits)?;
        let gw = Float::with_val(w.prec(), &w - &wl);
        let gp = Float::with_val(p.prec(), &p - &pl);
        t.push(vec![
            n.to_string(),
            zetalab::real::format_decimal(&w, digits as usize),
            zetalab::real::format_decimal(&gw, 3),
            zetalab::real::format_decimal(&p, digits as usize),
            zetalab::real::format_decimal(&gp, 3),
        ]);
    }
    rep.table = Some(t);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_of_small_weights() {
        let raw = |p, a, b, c, d| closed_form(&MomentFamily::Raw(BesselProduct::new(p, a, b, c, d))).unwrap().render();
        assert_eq!(raw(1, 4, 0, 0, 0), "7/8*zeta(3)");
        assert_eq!(raw(1, 1, 0, 0, 0), "1");
        assert_eq!(raw(1, 2, 0, 0, 0), "1/2");
        assert_eq!(raw(0, 1, 0, 0, 0), "1/2*pi");
        assert_eq!(raw(1, 3, 0, 0, 0), "1/12*(psi1(1/3)-psi1(2/3))");
        assert_eq!(raw(1, 3, 0, 1, 0), "3/8*zeta(2)");
        // int u^3 K0^4 = (7 zeta(3)/2 - 3)/16
        assert_eq!(raw(3, 4, 0, 0, 0), "-3/16 + 7/32*zeta(3)");
        let norm = closed_form(&MomentFamily::Normalized { kappa: 4, n: 4, j: 0 }).unwrap();
        assert_eq!(norm.render(), "-9/512 + 49/3072*zeta(3)");
        assert!(closed_form(&MomentFamily::Raw(BesselProduct::new(1, 5, 0, 0, 0))).is_none());
    }

    #[test]
    fn relation_strings() {
        let c: Vec<Integer> = [77, -1, 0, 72].iter().map(|&x| Integer::from(x)).collect();
        let l: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        assert_eq!(relation_string(&c, &l), "77*a - 1*b + 72*d = 0");
    }
}
