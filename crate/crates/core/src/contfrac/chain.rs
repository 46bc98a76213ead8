//! The moment chain `z(k) = d(k) u(k) - c(k)`, iterated down to `z(0)`
//! symbolically in `I = int u K0^kappa`.

use rug::{Integer, Rational};
use serde::Serialize;
use std::fmt;

use super::{catalog_entry, ContFracSpec};
use crate::error::{Error, Result};
use crate::momentalg::{decompose, MomentIndex};
use crate::quadrature::{moment, BesselProduct};
use crate::real::{BigReal, Precision};

/// `(p + q I)/(r + s I)` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub s: Rational,
}

impl Mobius {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Self {
        Mobius {
            p: p.into(),
            q: q.into(),
            r: r.into(),
            s: s.into(),
        }
    }

    /// Same function of `I`, compared by cross multiplication.
    pub fn same_as(&self, o: &Mobius) -> bool {
        // (p + qI)(r' + s'I) == (p' + q'I)(r + sI)
        let c0 = Rational::from(&self.p * &o.r) - Rational::from(&o.p * &self.r);
        let c1 = Rational::from(&self.p * &o.s) + Rational::from(&self.q * &o.r)
            - Rational::from(&o.p * &self.s)
            - Rational::from(&o.q * &self.r);
        let c2 = Rational::from(&self.q * &o.s) - Rational::from(&o.q * &self.s);
        c0 == 0 && c1 == 0 && c2 == 0
    }

    /// Scaled to coprime integers with a nonnegative leading denominator term.
    pub fn normalized(&self) -> Mobius {
        let all = [&self.p, &self.q, &self.r, &self.s];
        let mut l = Integer::from(1);
        for c in all {
            l.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = all
            .iter()
            .map(|c| c.numer() * Integer::from(&l / c.denom()))
            .collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        if g == 0 {
            return self.clone();
        }
        if ints[2] < 0 || (ints[2] == 0 && ints[3] < 0) {
            g = -g;
        }
        let v: Vec<Rational> = ints.into_iter().map(|c| Rational::from(c.div_exact(&g))).collect();
        Mobius {
            p: v[0].clone(),
            q: v[1].clone(),
            r: v[2].clone(),
            s: v[3].clone(),
        }
    }

    /// `n/(d + self)`.
    fn step(&self, n: &Rational, d: &Rational) -> Mobius {
        Mobius {
            p: Rational::from(n * &self.r),
            q: Rational::from(n * &self.s),
            r: Rational::from(d * &self.r) + &self.p,
            s: Rational::from(d * &self.s) + &self.q,
        }
    }

    pub fn evaluate(&self, i: &BigReal) -> Result<BigReal> {
        let bits = i.prec();
        let lin = |a: &Rational, b: &Rational| {
            &BigReal::from_rational(a, bits) + &i.mul_rational(b)
        };
        let den = lin(&self.r, &self.s);
        if den.value().is_zero() {
            return Err(Error::Evaluation("Mobius denominator vanishes".into()));
        }
        Ok(&lin(&self.p, &self.q) / &den)
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.normalized();
        write!(f, "({} + {}*I)/({} + {}*I)", n.p, n.q, n.r, n.s)
    }
}

impl Serialize for Mobius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub kappa: u32,
    pub start_k: i64,
    /// `z(start_k)` as a function of `I`.
    pub z_start: Mobius,
    pub z0: Mobius,
    /// Expected `z(0)`: `3/(2I) - 2` for kappa 4, `3/(2I) - 3` for kappa 3.
    pub z0_expected: Mobius,
    pub closed_form_ok: bool,
    /// Catalog entry driving the iteration.
    pub fraction: String,
    #[serde(serialize_with = "ser_real")]
    pub z0_value: BigReal,
    #[serde(serialize_with = "ser_real")]
    pub target_value: BigReal,
}

fn ser_real<S: serde::Serializer>(x: &BigReal, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_decimal(40))
}

struct ChainData {
    start_k: i64,
    j_top: u32,
    d: i64,
    c: i64,
    fraction: &'static str,
    expected: Mobius,
}

fn chain_data(kappa: u32) -> Result<ChainData> {
    match kappa {
        // d(k) = 3k^2(k-1), c(k) = (2+5k)(1+k)^2 at k = 2
        4 => Ok(ChainData {
            start_k: 2,
            j_top: 4,
            d: 12,
            c: 108,
            fraction: "zeta3_kappa4",
            expected: Mobius::new(3, -4, 0, 2),
        }),
        // d(k) = 6k^2, c(k) = (1+k)(3+7k) at k = 1
        3 => Ok(ChainData {
            start_k: 1,
            j_top: 2,
            d: 6,
            c: 20,
            fraction: "psi1_kappa3",
            expected: Mobius::new(3, -6, 0, 2),
        }),
        _ => Err(Error::InvalidArgument(format!("the moment chain needs kappa in {{3, 4}}, got {kappa}"))),
    }
}

/// Build `z(start)` from exact decompositions and iterate the continued
/// fraction down to `z(0)`.
pub fn z_chain_from_moments(kappa: u32, prec: &Precision) -> Result<ChainReport> {
    let cd = chain_data(kappa)?;
    let n = 2 * cd.start_k as u32;
    let lo = decompose(&MomentIndex::new(kappa, n, 0)?)?;
    let hi = decompose(&MomentIndex::new(kappa, n, cd.j_top)?)?;
    let (d, c) = (Rational::from(cd.d), Rational::from(cd.c));
    // z = d * hi/lo - c
    let z_start = Mobius {
        p: Rational::from(&d * &hi.coeff_one) - Rational::from(&c * &lo.coeff_one),
        q: Rational::from(&d * &hi.coeff(1)) - Rational::from(&c * &lo.coeff(1)),
        r: lo.coeff_one.clone(),
        s: lo.coeff(1),
    };
    let spec: ContFracSpec = catalog_entry(cd.fraction)?;
    let mut z = z_start.clone();
    for k in (1..=cd.start_k).rev() {
        let nk = Rational::from(spec.numerator.eval_i64(k));
        let dk = Rational::from((spec.denominator.eval_i64(k), spec.divisor));
        z = z.step(&nk, &dk);
        if z.r == 0 && z.s == 0 {
            return Err(Error::Evaluation(format!("chain denominator vanishes at k = {k}")));
        }
    }
    let i = moment(&BesselProduct::k0_power(1, kappa), prec)?.value;
    let z0_value = z.evaluate(&i)?;
    let target_value = spec.target.evaluate(prec)?;
    Ok(ChainReport {
        kappa,
        start_k: cd.start_k,
        closed_form_ok: z.same_as(&cd.expected),
        z_start,
        z0: z,
        z0_expected: cd.expected,
        fraction: cd.fraction.into(),
        z0_value,
        target_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    #[test]
    fn kappa_four_chain() {
        let p = Precision::digits(30);
        let r = z_chain_from_moments(4, &p).unwrap();
        // -96(37 - 36I)/(27 - 28I)
        assert!(r.z_start.same_as(&Mobius::new(-96 * 37, 96 * 36, 27, -28)));
        assert!(r.closed_form_ok, "{}", r.z0);
        let d = Float::with_val(p.bits(), r.z0_value.value() - r.target_value.value()).abs();
        assert!(d < 1e-27);
    }

    #[test]
    fn kappa_three_chain() {
        let p = Precision::digits(30);
        let r = z_chain_from_moments(3, &p).unwrap();
        assert!(r.z_start.same_as(&Mobius::new(23, -40, -1, 2)));
        assert!(r.closed_form_ok, "{}", r.z0);
        let d = Float::with_val(p.bits(), r.z0_value.value() - r.target_value.value()).abs();
        assert!(d < 1e-27);
    }

    #[test]
    fn mobius_normalization() {
        let m = Mobius::new(-2, 4, -6, 8).normalized();
        assert_eq!(m, Mobius::new(1, -2, 3, -4));
        assert_eq!(m.to_string(), "(1 + -2*I)/(3 + -4*I)");
        assert!(chain_data(5).is_err());
    }
}
