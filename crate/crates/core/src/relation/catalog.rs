//! Published integer relations among Bessel moments, nested integrals and
//! zeta values, rediscovered blind.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;
use std::collections::HashMap;

use super::{canonical_sign, pslq, PslqOutcome, RelationProblem};
use crate::contfrac::{catalog_entry, cf_value, Provenance};
use crate::error::{Error, Result};
use crate::quadrature::{f_family, g_family, i_rho2_alpha6, moment, nested_moment, BesselProduct};
use crate::real::{BigReal, Precision};
use crate::specfun::zeta;

/// One identity: `values[0] = sum c_i values[i]` with published rational `c_i`
/// (or a bare integer vector).
#[derive(Clone, Debug)]
pub struct IdentitySpec {
    pub name: &'static str,
    pub keys: Vec<&'static str>,
    pub published: Vec<Integer>,
    pub provenance: Provenance,
}

fn from_rationals(cs: &[(i64, i64)]) -> Vec<Integer> {
    // lhs - sum c_i v_i = 0, cleared of denominators
    let mut v = vec![Rational::from(1)];
    v.extend(cs.iter().map(|&c| -Rational::from(c)));
    let mut l = Integer::from(1);
    for c in &v {
        l.lcm_mut(c.denom());
    }
    let ints: Vec<Integer> = v
        .iter()
        .map(|c| c.numer() * Integer::from(&l / c.denom()))
        .collect();
    let mut g = Integer::new();
    for c in &ints {
        g.gcd_mut(c);
    }
    canonical_sign(&ints.into_iter().map(|c| c.div_exact(&g)).collect::<Vec<_>>())
}

fn ints(v: &[i64]) -> Vec<Integer> {
    canonical_sign(&v.iter().map(|&c| Integer::from(c)).collect::<Vec<_>>())
}

const WEIGHT6: [&str; 5] = ["B1_6", "B3_6", "1", "zeta3", "zeta5"];

fn weight6(lhs: &'static str) -> Vec<&'static str> {
    let mut k = vec![lhs];
    k.extend(WEIGHT6);
    k
}

pub fn catalog_identities() -> Vec<IdentitySpec> {
    use Provenance::*;
    vec![
        IdentitySpec {
            name: "zeta5_weight8",
            keys: vec!["zeta5", "B1_8", "B3_8"],
            published: ints(&[77, -1, 72]),
            provenance: PslqConjectural,
        },
        IdentitySpec {
            name: "kappa4_basis",
            keys: vec!["1", "B1_4", "B3_4"],
            published: ints(&[-3, 4, -16]),
            provenance: Proved,
        },
        IdentitySpec {
            name: "rho2_alpha6",
            keys: vec!["I_rho2_alpha6", "B1_6", "B3_6", "zeta5"],
            published: from_rationals(&[(1, 30), (1, 20), (-31, 160)]),
            provenance: PslqConjectural,
        },
        IdentitySpec {
            name: "nested_f3g1",
            keys: weight6("S_3_1"),
            published: from_rationals(&[(1, 48), (-3, 160), (0, 1), (-7, 96), (-31, 1280)]),
            provenance: PslqConjectural,
        },
        IdentitySpec {
            name: "nested_f5g1",
            keys: weight6("S_5_1"),
            published: from_rationals(&[(211, 11520), (3953, 23040), (11, 9216), (-1, 9), (-93, 5120)]),
            provenance: PslqConjectural,
        },
        IdentitySpec {
            name: "nested_f7g1",
            keys: weight6("S_7_1"),
            published: from_rationals(&[
                (108731, 1728000),
                (4256617, 3456000),
                (27877, 460800),
                (-8, 15),
                (-279, 5120),
            ]),
            provenance: PslqConjectural,
        },
        IdentitySpec {
            name: "nested_f3g5",
            keys: weight6("S_3_5"),
            published: from_rationals(&[
                (-28921, 691200),
                (1151533, 1382400),
                (14653, 184320),
                (25, 192),
                (279, 20480),
            ]),
            provenance: PslqConjectural,
        },
        IdentitySpec {
            name: "zeta2_pslq_fraction",
            keys: vec!["cf_zeta2_pslq", "1", "inv_zeta2"],
            published: from_rationals(&[(-4, 1), (7, 1)]),
            provenance: PslqConjectural,
        },
    ]
}

fn label(key: &str) -> String {
    match key {
        "1" => "1".into(),
        "zeta3" => "zeta(3)".into(),
        "zeta5" => "zeta(5)".into(),
        "inv_zeta2" => "1/zeta(2)".into(),
        "I_rho2_alpha6" => "I_rho2alpha6".into(),
        "cf_zeta2_pslq" => "z(0) of zeta2_pslq".into(),
        k if k.starts_with('B') => {
            let (p, a) = k[1..].split_once('_').unwrap_or(("1", "1"));
            format!("int u^{p} K0^{a}")
        }
        k if k.starts_with("S_") => {
            let (a, b) = k[2..].split_once('_').unwrap_or(("1", "1"));
            format!("Z(f{a},g{b}) + Z(f{b},g{a})")
        }
        k => k.into(),
    }
}

/// Values by key, computed once.
struct Values {
    prec: Precision,
    cache: HashMap<&'static str, BigReal>,
}

impl Values {
    fn get(&mut self, key: &'static str) -> Result<BigReal> {
        if let Some(v) = self.cache.get(key) {
            return Ok(v.clone());
        }
        let p = &self.prec;
        let v = match key {
            "1" => BigReal::exact(Float::with_val(p.bits(), 1)),
            "zeta3" => zeta(3, p)?,
            "zeta5" => zeta(5, p)?,
            "inv_zeta2" => zeta(2, p)?.recip(),
            "I_rho2_alpha6" => i_rho2_alpha6(p)?.value,
            "cf_zeta2_pslq" => {
                let spec = catalog_entry("zeta2_pslq")?;
                cf_value(&spec, p.target_digits + 60, p)?
            }
            k if k.starts_with('B') => {
                let (pw, a) = k[1..].split_once('_').unwrap_or_default();
                let (pw, a) = (pw.parse().unwrap_or(1), a.parse().unwrap_or(1));
                moment(&BesselProduct::k0_power(pw, a), p)?.value
            }
            k if k.starts_with("S_") => {
                let (a, b) = k[2..].split_once('_').unwrap_or_default();
                let (a, b): (u32, u32) = (a.parse().unwrap_or(1), b.parse().unwrap_or(1));
                let x = nested_moment(&f_family(a), &g_family(b), p)?.value;
                let y = nested_moment(&f_family(b), &g_family(a), p)?.value;
                &x + &y
            }
            k => return Err(Error::InvalidArgument(format!("unknown value key {k}"))),
        };
        self.cache.insert(key, v.clone());
        Ok(v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub labels: Vec<String>,
    pub provenance: Provenance,
    pub published_vector: Vec<String>,
    pub recovered_vector: Option<Vec<String>>,
    /// `|published . values|`.
    pub published_residual: String,
    /// `|recovered . values|`, when a relation was found.
    pub residual_decimal_string: Option<String>,
    pub digits_used: u32,
    pub confidence_digits: u32,
    pub matches: bool,
}

fn dot(v: &[Integer], xs: &[BigReal], bits: u32) -> BigReal {
    let mut acc = BigReal::exact(Float::with_val(bits, 0));
    for (c, x) in v.iter().zip(xs) {
        if *c != 0 {
            acc = &acc + &(&BigReal::from_integer(c, bits) * x);
        }
    }
    acc.abs()
}

/// Evaluate every catalogued identity at `prec` and rediscover its integer
/// vector by PSLQ with detection threshold `10^-confidence_digits`.
pub fn verify_catalog_identities(
    prec: &Precision,
    confidence_digits: u32,
    only: Option<&[&str]>,
) -> Result<Vec<IdentityReport>> {
    let mut values = Values {
        prec: *prec,
        cache: HashMap::new(),
    };
    let mut out = Vec::new();
    for id in catalog_identities() {
        if only.is_some_and(|names| !names.contains(&id.name)) {
            continue;
        }
        let xs: Vec<BigReal> = id.keys.iter().map(|k| values.get(k)).collect::<Result<_>>()?;
        let labels: Vec<String> = id.keys.iter().map(|k| label(k)).collect();
        let bits = prec.bits();
        let published_residual = dot(&id.published, &xs, bits);
        let problem = RelationProblem::new(
            xs.clone(),
            (0..xs.len()).map(|i| format!("x{i}")).collect(),
            Integer::from(10).pow(15),
            confidence_digits,
        );
        let outcome = pslq(&problem)?;
        let (recovered, residual) = match &outcome {
            PslqOutcome::Relation(r) => (Some(r.coefficients.clone()), Some(r.residual.to_decimal(6))),
            PslqOutcome::NoRelation { .. } => (None, None),
        };
        let matches = recovered.as_ref().is_some_and(|r| *r == id.published);
        out.push(IdentityReport {
            name: id.name.into(),
            labels,
            provenance: id.provenance,
            published_vector: id.published.iter().map(|c| c.to_string()).collect(),
            recovered_vector: recovered.map(|r| r.iter().map(|c| c.to_string()).collect()),
            published_residual: published_residual.to_decimal(6),
            residual_decimal_string: residual,
            digits_used: prec.target_digits,
            confidence_digits,
            matches,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cleared_vectors() {
        let ids = catalog_identities();
        let nice = ids.iter().find(|i| i.name == "nested_f3g1").unwrap();
        // lcm(48, 160, 96, 1280) = 3840
        assert_eq!(nice.published, ints(&[3840, -80, 72, 0, 280, 93]));
        let rho = ids.iter().find(|i| i.name == "rho2_alpha6").unwrap();
        assert_eq!(rho.published, ints(&[480, -16, -24, 93]));
        assert_eq!(ids.len(), 8);
    }

    #[test]
    fn cheap_identities_rediscovered() {
        let p = Precision::digits(60);
        let r = verify_catalog_identities(&p, 40, Some(&["kappa4_basis", "zeta2_pslq_fraction", "zeta5_weight8"]))
            .unwrap();
        assert_eq!(r.len(), 3);
        for rep in &r {
            assert!(rep.matches, "{rep:?}");
        }
    }
}
