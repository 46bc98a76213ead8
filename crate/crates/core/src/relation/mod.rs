//! Integer relation detection with PSLQ.

mod catalog;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{bits_for_digits, pow10, BigReal};

pub use catalog::{catalog_identities, verify_catalog_identities, IdentityReport, IdentitySpec};

#[derive(Clone, Debug)]
pub struct RelationProblem {
    pub values: Vec<BigReal>,
    pub labels: Vec<String>,
    pub max_coeff: Integer,
    pub confidence_digits: u32,
}

impl RelationProblem {
    pub fn new(values: Vec<BigReal>, labels: Vec<String>, max_coeff: Integer, confidence_digits: u32) -> Self {
        RelationProblem {
            values,
            labels,
            max_coeff,
            confidence_digits,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegerRelation {
    pub coefficients: Vec<Integer>,
    /// `|sum a_i v_i|` on the original values.
    pub residual: BigReal,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub enum PslqOutcome {
    Relation(IntegerRelation),
    /// No relation with Euclidean norm below `norm_bound` exists at this precision.
    NoRelation { norm_bound: Float, iterations: usize },
}

impl PslqOutcome {
    pub fn relation(&self) -> Option<&IntegerRelation> {
        match self {
            PslqOutcome::Relation(r) => Some(r),
            PslqOutcome::NoRelation { .. } => None,
        }
    }
}

/// Serializable summary of a relation.
#[derive(Clone, Debug, Serialize)]
pub struct RelationSummary {
    pub labels: Vec<String>,
    pub coefficients: Option<Vec<String>>,
    pub residual: Option<String>,
    pub norm_bound: Option<String>,
    pub iterations: usize,
}

impl RelationSummary {
    pub fn new(labels: &[String], out: &PslqOutcome) -> Self {
        match out {
            PslqOutcome::Relation(r) => RelationSummary {
                labels: labels.to_vec(),
                coefficients: Some(r.coefficients.iter().map(|c| c.to_string()).collect()),
                residual: Some(r.residual.to_decimal(6)),
                norm_bound: None,
                iterations: r.iterations,
            },
            PslqOutcome::NoRelation { norm_bound, iterations } => RelationSummary {
                labels: labels.to_vec(),
                coefficients: None,
                residual: None,
                norm_bound: Some(crate::real::format_decimal(norm_bound, 6)),
                iterations: *iterations,
            },
        }
    }
}

fn gamma(bits: u32) -> Float {
    // 2/sqrt(3) + 1/100
    let s = Float::with_val(bits, 3).sqrt();
    Float::with_val(bits, 2 / s) + Float::with_val(bits, 0.01)
}

fn round_int(x: &Float) -> Integer {
    x.to_integer_round(Round::Nearest).map(|(i, _)| i).unwrap_or_default()
}

/// Canonical sign: first nonzero coefficient positive.
pub fn canonical_sign(v: &[Integer]) -> Vec<Integer> {
    let neg = v.iter().find(|c| **c != 0).is_some_and(|c| *c < 0);
    v.iter().map(|c| if neg { Integer::from(-c) } else { c.clone() }).collect()
}

/// PSLQ on the values of `problem`.
pub fn pslq(problem: &RelationProblem) -> Result<PslqOutcome> {
    let n = problem.values.len();
    if n < 2 {
        return Err(Error::InvalidArgument("PSLQ needs at least two values".into()));
    }
    if problem.labels.len() != n {
        return Err(Error::InvalidArgument("one label per value is required".into()));
    }
    if problem.max_coeff < 1 {
        return Err(Error::InvalidArgument("max_coeff must be positive".into()));
    }
    let conf = problem.confidence_digits;
    let in_bits = problem.values.iter().map(|v| v.prec()).min().unwrap_or(0);
    let bits = in_bits.max(bits_for_digits(conf + 10)) + 32;
    // center to unit scale
    let scale = problem
        .values
        .iter()
        .map(|v| Float::with_val(bits, v.value().abs_ref()))
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or_else(|| Float::new(bits));
    if scale.is_zero() {
        return Err(Error::InvalidArgument("all values are zero".into()));
    }
    let needed = Float::with_val(64, pow10(-(conf as i64) - 10, 64));
    for v in &problem.values {
        let rel = Float::with_val(64, v.radius() / &scale);
        let ulp_rel = Float::with_val(64, 2).pow(-(v.prec() as i32));
        if rel > needed || ulp_rel > needed {
            return Err(Error::Precondition { required_digits: conf + 10 });
        }
    }
    let x: Vec<Float> = problem
        .values
        .iter()
        .map(|v| Float::with_val(bits, v.value() / &scale))
        .collect();
    if let Some(i) = x.iter().position(|v| v.is_zero()) {
        let mut c = vec![Integer::new(); n];
        c[i] = Integer::from(1);
        return Ok(PslqOutcome::Relation(finish(problem, c, 0)));
    }
    let tol = pow10(-(conf as i64), bits);
    let g = gamma(bits);
    let zero = || Float::new(bits);

    // partial norms s_k = sqrt(sum_{j>=k} x_j^2)
    let mut s = vec![zero(); n];
    for k in 0..n {
        let mut acc = zero();
        for xj in &x[k..] {
            acc += Float::with_val(bits, xj.square_ref());
        }
        s[k] = acc.sqrt();
    }
    let t = s[0].clone();
    let mut y: Vec<Float> = x.iter().map(|v| Float::with_val(bits, v / &t)).collect();
    for sk in s.iter_mut() {
        *sk /= &t;
    }
    let mut h = vec![vec![zero(); n - 1]; n];
    for i in 0..n {
        for j in 0..(n - 1).min(i + 1) {
            if i == j {
                h[i][j] = Float::with_val(bits, &s[j + 1] / &s[j]);
            } else if !s[j].is_zero() && !s[j + 1].is_zero() {
                let d = Float::with_val(bits, &s[j] * &s[j + 1]);
                h[i][j] = -Float::with_val(bits, &y[i] * &y[j]) / d;
            }
        }
    }
    let mut b: Vec<Vec<Integer>> = (0..n)
        .map(|i| (0..n).map(|j| Integer::from(i == j)).collect())
        .collect();

    let reduce_row = |i: usize, jmax: usize, h: &mut Vec<Vec<Float>>, y: &mut Vec<Float>, b: &mut Vec<Vec<Integer>>| {
        for j in (0..=jmax).rev() {
            if h[j][j].is_zero() {
                continue;
            }
            let q = Float::with_val(bits, &h[i][j] / &h[j][j]);
            let t = round_int(&q);
            if t == 0 {
                continue;
            }
            let tf = Float::with_val(bits, &t);
            let yi = Float::with_val(bits, &y[i] * &tf);
            y[j] += yi;
            for k in 0..=j {
                let d = Float::with_val(bits, &h[j][k] * &tf);
                h[i][k] -= d;
            }
            for row in b.iter_mut() {
                let d = Integer::from(&row[i] * &t);
                row[j] += d;
            }
        }
    };
    for i in 1..n {
        reduce_row(i, i - 1, &mut h, &mut y, &mut b);
    }

    let detect = |y: &[Float], b: &[Vec<Integer>]| -> Option<Vec<Integer>> {
        let mut found: Option<(usize, Float)> = None;
        for (i, yi) in y.iter().enumerate() {
            let a = Float::with_val(bits, yi.abs_ref());
            if a < tol && found.as_ref().is_none_or(|(_, f)| a < *f) {
                found = Some((i, a));
            }
        }
        let (i, _) = found?;
        let coeffs: Vec<Integer> = b.iter().map(|row| row[i].clone()).collect();
        coeffs
            .iter()
            .all(|c| Integer::from(c.abs_ref()) <= problem.max_coeff)
            .then_some(coeffs)
    };
    // the initial reduction alone can expose a relation, e.g. between equal values
    if let Some(coeffs) = detect(&y, &b) {
        return Ok(PslqOutcome::Relation(finish(problem, coeffs, 0)));
    }
    let max_iter = 200 * n * n * (conf as usize).max(10);
    let max_coeff = Float::with_val(bits, &problem.max_coeff);
    let mut norm_bound = zero();
    for iter in 1..=max_iter {
        // pivot
        let mut m = 0;
        let mut best = zero();
        let mut gp = Float::with_val(bits, 1);
        for i in 0..n - 1 {
            gp *= &g;
            let v = Float::with_val(bits, h[i][i].abs_ref()) * &gp;
            if v > best {
                best = v;
                m = i;
            }
        }
        y.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let t0 = Float::with_val(bits, h[m][m].square_ref())
                + Float::with_val(bits, h[m][m + 1].square_ref());
            let t0 = t0.sqrt();
            if t0.is_zero() {
                break;
            }
            let t1 = Float::with_val(bits, &h[m][m] / &t0);
            let t2 = Float::with_val(bits, &h[m][m + 1] / &t0);
            for row in h.iter_mut().skip(m) {
                let t3 = row[m].clone();
                let t4 = row[m + 1].clone();
                row[m] = Float::with_val(bits, &t1 * &t3) + Float::with_val(bits, &t2 * &t4);
                row[m + 1] = Float::with_val(bits, &t1 * &t4) - Float::with_val(bits, &t2 * &t3);
            }
        }
        for i in m + 1..n {
            reduce_row(i, (i - 1).min(m + 1), &mut h, &mut y, &mut b);
        }
        if let Some(coeffs) = detect(&y, &b) {
            return Ok(PslqOutcome::Relation(finish(problem, coeffs, iter)));
        }
        // exclusion bound
        let mut hmax = zero();
        for (i, row) in h.iter().enumerate().take(n - 1) {
            let a = Float::with_val(bits, row[i].abs_ref());
            if a > hmax {
                hmax = a;
            }
        }
        if !hmax.is_zero() {
            let nb = Float::with_val(bits, 1) / hmax;
            if nb > norm_bound {
                norm_bound = nb;
            }
        }
        if norm_bound > max_coeff {
            return Ok(PslqOutcome::NoRelation {
                norm_bound: Float::with_val(64, &norm_bound),
                iterations: iter,
            });
        }
    }
    Ok(PslqOutcome::NoRelation {
        norm_bound: Float::with_val(64, &norm_bound),
        iterations: max_iter,
    })
}

fn finish(problem: &RelationProblem, coeffs: Vec<Integer>, iterations: usize) -> IntegerRelation {
    let coeffs = canonical_sign(&coeffs);
    let bits = problem.values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let mut acc = BigReal::exact(Float::with_val(bits, 0));
    for (c, v) in coeffs.iter().zip(&problem.values) {
        if *c != 0 {
            acc = &acc + &(&BigReal::from_integer(c, bits) * v);
        }
    }
    IntegerRelation {
        coefficients: coeffs,
        residual: acc.abs(),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Precision;
    use crate::specfun::zeta;
    use rug::float::Constant;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn simple_relation() {
        let bits = bits_for_digits(60);
        let s2 = BigReal::exact(Float::with_val(bits, 2).sqrt());
        let one = BigReal::exact(Float::with_val(bits, 1));
        let v = &(&s2.mul_rational(&3.into()) + &one).mul_rational(&1.into());
        let p = RelationProblem::new(vec![v.clone(), one, s2], labels(3), Integer::from(1000), 40);
        let r = pslq(&p).unwrap();
        let rel = r.relation().expect("relation");
        assert_eq!(rel.coefficients, vec![Integer::from(1), Integer::from(-1), Integer::from(-3)]);
    }

    #[test]
    fn pi_has_no_small_relation() {
        let bits = bits_for_digits(70);
        let pi = BigReal::rounded(Float::with_val(bits, Constant::Pi));
        let one = BigReal::exact(Float::with_val(bits, 1));
        let p = RelationProblem::new(vec![one, pi], labels(2), Integer::from(1_000_000), 50);
        match pslq(&p).unwrap() {
            PslqOutcome::NoRelation { norm_bound, .. } => assert!(norm_bound >= 1e6),
            PslqOutcome::Relation(r) => panic!("spurious {:?}", r.coefficients),
        }
    }

    #[test]
    fn precondition_reported() {
        let p = Precision::digits(30);
        let z = zeta(3, &p).unwrap();
        let one = BigReal::exact(Float::with_val(p.bits(), 1));
        let prob = RelationProblem::new(vec![z, one], labels(2), Integer::from(100), 60);
        assert_eq!(pslq(&prob).unwrap_err(), Error::Precondition { required_digits: 70 });
    }

    #[test]
    fn zeta2_is_pi_squared_over_six() {
        let p = Precision::digits(60);
        let z2 = zeta(2, &p).unwrap();
        let pi2 = BigReal::rounded(Float::with_val(p.bits(), Constant::Pi).square());
        let prob = RelationProblem::new(vec![z2, pi2], labels(2), Integer::from(100), 40);
        let r = pslq(&prob).unwrap();
        assert_eq!(r.relation().unwrap().coefficients, vec![Integer::from(6), Integer::from(-1)]);
    }
}
