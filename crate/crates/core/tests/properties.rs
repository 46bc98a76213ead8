use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use zetalab::momentalg::{decompose, even_constraint, linalg, step_matrix, two_step_coeffs, MomentIndex};
use zetalab::periods::{simplex_integrand_exact, sym_triple_exact, Form, PeriodSpec};
use zetalab::quadrature::{f_family, g_family, moment, nested_moment, normalized_moment, BesselProduct};
use zetalab::relation::{canonical_sign, pslq, PslqOutcome, RelationProblem};
use zetalab::specfun::{bessel_i, bessel_k};
use zetalab::{BigReal, Precision};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// `|a - b|` is within the summed radii plus `slack`.
fn agree(a: &BigReal, b: &BigReal, slack: f64) -> bool {
    let bits = a.prec().max(b.prec());
    let d = Float::with_val(bits, a.value() - b.value()).abs();
    let r = Float::with_val(bits, a.radius() + b.radius()) + slack;
    d <= r
}

/// A value in (0, 1) built from 256 random bits.
fn random_real(words: &[u64], bits: u32) -> BigReal {
    let mut x = Float::with_val(bits, 0);
    for (i, w) in words.iter().enumerate() {
        x += Float::with_val(bits, *w) >> (64 * (i as u32 + 1));
    }
    BigReal::exact(x)
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn wronskian(num in 1u32..3000, den in 1u32..100) {
        let x = Rational::from((num, den));
        prop_assume!(x <= 30);
        let p = Precision::digits(30);
        let xb = BigReal::exact(Float::with_val(p.bits(), &x));
        let w = &(&bessel_i(1, &xb, &p).unwrap() * &bessel_k(0, &xb, &p).unwrap())
            + &(&bessel_i(0, &xb, &p).unwrap() * &bessel_k(1, &xb, &p).unwrap());
        let w = &w * &xb;
        let one = BigReal::exact(Float::with_val(p.bits(), 1));
        prop_assert!(agree(&w, &one, 1e-60), "x = {x}: {}", w.to_decimal(35));
    }

    #[test]
    fn parity_is_conserved(kappa in 1u32..10, dn in 0u32..12, j in 0u32..10) {
        prop_assume!(j <= kappa);
        let n = kappa + dn;
        let Ok(c) = two_step_coeffs(kappa, n, j) else { return Ok(()) };
        // the composed two-step map only reaches j - 2, j, j + 2
        let m = linalg::mat_mul(&step_matrix(kappa, n).unwrap(), &step_matrix(kappa, n + 1).unwrap());
        for (col, v) in m[j as usize].iter().enumerate() {
            let off = col as i64 - j as i64;
            if off % 2 != 0 {
                prop_assert_eq!(v, &Rational::new());
            }
        }
        if j >= 2 {
            prop_assert_eq!(&m[j as usize][j as usize - 2], &c[0]);
        }
        prop_assert_eq!(&m[j as usize][j as usize], &c[1]);
    }

    #[test]
    fn even_kappa_left_kernel(half in 1u32..6, dn in 0u32..20) {
        let kappa = 2 * half;
        let n = kappa + dn;
        let c = even_constraint(kappa, n).unwrap();
        let mut v = vec![Rational::new(); kappa as usize + 1];
        for (l, x) in c.into_iter().enumerate() {
            v[2 * l] = Rational::from(x);
        }
        let m = step_matrix(kappa, n).unwrap();
        prop_assert!(linalg::vec_mat(&v, &m).iter().all(|x| *x == 0));
        prop_assert_eq!(linalg::determinant(&m), Rational::new());
    }

    #[test]
    fn planted_relation_is_recovered(
        coeffs in prop::collection::vec(-10_000i64..=10_000, 3..=5),
        words in prop::collection::vec(any::<u64>(), 20),
        scale in (1u32..1000, 1u32..1000),
    ) {
        let last = *coeffs.last().unwrap();
        prop_assume!(last != 0);
        let a: Vec<Integer> = coeffs.iter().map(|&c| Integer::from(c)).collect();
        let g = a.iter().fold(Integer::new(), |g, c| g.gcd(c));
        let a: Vec<Integer> = a.into_iter().map(|c| c / &g).collect();
        let bits = Precision::digits(60).bits();
        let mut values: Vec<BigReal> = (0..a.len() - 1).map(|i| random_real(&words[4 * i..4 * i + 4], bits)).collect();
        let mut s = Float::with_val(bits, 0);
        for (c, v) in a.iter().zip(&values) {
            s += Float::with_val(bits, c * v.value());
        }
        values.push(BigReal::rounded(-s / Float::with_val(bits, a.last().unwrap())));
        let labels: Vec<String> = (0..a.len()).map(|i| format!("x{i}")).collect();
        // a common rational factor must not change the answer
        let q = Rational::from(scale);
        let scaled: Vec<BigReal> = values.iter().map(|v| v.mul_rational(&q)).collect();
        for vals in [values, scaled] {
            let out = pslq(&RelationProblem::new(vals, labels.clone(), Integer::from(1_000_000), 50)).unwrap();
            let PslqOutcome::Relation(r) = out else { return Err(TestCaseError::fail("no relation found")) };
            prop_assert_eq!(canonical_sign(&r.coefficients), canonical_sign(&a));
        }
    }

    #[test]
    fn sym_triple_homogeneity_and_am_gm(
        parts in prop::collection::vec((1i64..1000, 1i64..1000), 1..6),
        t in (1i64..50, 1i64..50),
    ) {
        let a: Vec<Rational> = parts.iter().map(|&(p, q)| Rational::from((p, q))).collect();
        let t = Rational::from(t);
        let (u, v, w) = sym_triple_exact(&a).unwrap();
        let scaled: Vec<Rational> = a.iter().map(|x| Rational::from(x * &t)).collect();
        let (us, vs, ws) = sym_triple_exact(&scaled).unwrap();
        let m = a.len() as i32;
        prop_assert_eq!(us, Rational::from(&u * &t));
        prop_assert_eq!(vs, v * t.clone().pow(m - 1));
        prop_assert_eq!(ws, &w * t.clone().pow(m));
        let mean = u / Rational::from(m);
        prop_assert!(w <= mean.pow(m));
    }

    #[test]
    fn simplex_integrand_is_positive(
        n in 3u32..=6,
        p in prop::sample::select(vec![1u32, 3]),
        weights in prop::collection::vec(1u32..1000, 8),
    ) {
        let spec = PeriodSpec::new(n, p, Form::RawSimplex).unwrap();
        let d = spec.dimension();
        // a point strictly inside the simplex: d + 1 positive weights normalized
        let total: u32 = weights[..=d].iter().sum();
        let a: Vec<Rational> = weights[..d].iter().map(|&w| Rational::from((w, total))).collect();
        let f = simplex_integrand_exact(&spec, &a).unwrap();
        prop_assert!(f > 0);
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn shuffle_relation(nf in 2u32..6, ng in 1u32..6, first_f in any::<bool>(), second_g in any::<bool>()) {
        let p = Precision::digits(20);
        let f = if first_f { f_family(nf) } else { g_family(nf) };
        let g = if second_g { g_family(ng) } else { f_family(ng.max(2)) };
        let fg = nested_moment(&f, &g, &p).unwrap().value;
        let gf = nested_moment(&g, &f, &p).unwrap().value;
        let prod = &moment(&f, &p).unwrap().value * &moment(&g, &p).unwrap().value;
        prop_assert!(agree(&(&fg + &gf), &prod, 1e-18), "{f} {g}");
    }

    #[test]
    fn recurrence_consistency(kappa in 2u32..=5, dn in 0u32..4, j in 0u32..=5) {
        prop_assume!(j <= kappa);
        let n = kappa + dn;
        let p = Precision::digits(20);
        let m = step_matrix(kappa, n).unwrap();
        let lhs = normalized_moment(kappa, n, j, &p).unwrap().value;
        let mut rhs = BigReal::exact(Float::with_val(p.bits(), 0));
        for (col, c) in m[j as usize].iter().enumerate() {
            if *c != 0 {
                let v = normalized_moment(kappa, n + 1, col as u32, &p).unwrap().value;
                rhs = &rhs + &v.mul_rational(c);
            }
        }
        prop_assert!(agree(&lhs, &rhs, 1e-18));
    }

    #[test]
    fn decomposition_soundness(kappa in 3u32..=5, dn in 0u32..4, half_j in 0u32..3) {
        let n = kappa + dn;
        // the reducible family has n - j even
        let j = 2 * half_j + (n % 2);
        prop_assume!(j <= kappa);
        let Ok(idx) = MomentIndex::new(kappa, n, j) else { return Ok(()) };
        let Ok(d) = decompose(&idx) else { return Ok(()) };
        let p = Precision::digits(30);
        let direct = normalized_moment(kappa, n, j, &p).unwrap().value;
        let mut sum = BigReal::exact(Float::with_val(p.bits(), &d.coeff_one));
        for (m, c) in &d.coeffs {
            let b = moment(&BesselProduct::k0_power(*m, kappa), &p).unwrap().value;
            sum = &sum + &b.mul_rational(c);
        }
        prop_assert!(agree(&direct, &sum, 1e-28), "{kappa} {n} {j}: {d}");
    }
}
