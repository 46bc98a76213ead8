//! Values frozen from independent arbitrary-precision oracles (series sums and
//! adaptive Gauss-Legendre quadrature at 60 digits).

use rug::{Float, Rational};
use zetalab::quadrature::{moment, normalized_moment, BesselProduct};
use zetalab::real::parse_decimal;
use zetalab::specfun::{bessel_i, bessel_k, digamma_at_one, polygamma1, trigamma_third_difference, zeta};
use zetalab::{BigReal, Precision};

const DIGITS: u32 = 40;

fn check(name: &str, got: &BigReal, want: &str, digits: i64) {
    let bits = got.prec().max(200);
    let w = parse_decimal(want, bits).unwrap();
    let diff = Float::with_val(bits, got.value() - &w).abs();
    let tol = zetalab::real::pow10(-digits, bits) * Float::with_val(bits, w.abs_ref()).max(&Float::with_val(bits, 1));
    assert!(diff <= tol, "{name}: got {} want {want}", got.to_decimal(45));
    // the enclosure must be honest as well
    assert!(got.radius().to_f64() <= 1e-35 * w.to_f64().abs().max(1.0), "{name}: radius {}", got.radius_string());
}

fn exact(x: &str, p: &Precision) -> BigReal {
    BigReal::exact(parse_decimal(x, p.bits()).unwrap())
}

#[test]
fn bessel_values() {
    let p = Precision::digits(DIGITS);
    check("K0(1)", &bessel_k(0, &exact("1", &p), &p).unwrap(), "0.421024438240708333335627379212609036136219748", 39);
    check("K1(1)", &bessel_k(1, &exact("1", &p), &p).unwrap(), "0.60190723019723457473754000153561733926158689", 39);
    check("K0(7)", &bessel_k(0, &exact("7", &p), &p).unwrap(), "0.000424795741869231806851598652806572293979317525", 39);
    check("I0(2)", &bessel_i(0, &exact("2", &p), &p).unwrap(), "2.2795853023360672674372044408115333532858411", 39);
    check("I1(2)", &bessel_i(1, &exact("2", &p), &p).unwrap(), "1.59063685463732906338225442499966624795447816", 39);
}

#[test]
fn constants() {
    let p = Precision::digits(DIGITS);
    check("zeta(3)", &zeta(3, &p).unwrap(), "1.20205690315959428539973816151144999076498629", 39);
    check("zeta(5)", &zeta(5, &p).unwrap(), "1.03692775514336992633136548645703416805708092", 39);
    check("zeta(7)", &zeta(7, &p).unwrap(), "1.00834927738192282683979754984979675959986356", 39);
    check("psi0(1)", &digamma_at_one(&p), "-0.577215664901532860606512090082402431042159336", 39);
    check("psi1 difference", &trigamma_third_difference(&p), "7.03172171606837667180468686661683120728620903", 39);
    let sum = &polygamma1(&Rational::from((1, 3)), &p).unwrap() + &polygamma1(&Rational::from((2, 3)), &p).unwrap();
    // (psi1(1/3) + psi1(2/3))/8 = zeta(2)
    check("psi1 sum", &sum.mul_rational(&Rational::from((1, 8))), "1.64493406684822643647241516664602518921894990", 39);
}

#[test]
fn moments() {
    let p = Precision::digits(DIGITS);
    let cases = [
        (BesselProduct::k0_power(3, 4), "0.0754499475661612499311927228306296854798407514"),
        (BesselProduct::k0_power(1, 5), "2.49659925074976535618400178115149974324061143"),
        (BesselProduct::k0_power(3, 5), "0.0736740268545687828475758021639999325186055942"),
        (BesselProduct::k0_power(1, 6), "7.29713485159882959671043573881645652250994073"),
        (BesselProduct::k0_power(3, 6), "0.0947414190048684015843058540188541204901601577"),
        (BesselProduct::k0_power(0, 3), "6.94882278107962978943643644547082975767485113"),
        (BesselProduct::new(3, 2, 2, 0, 0), "0.325449947566161249931192722830629685479840751"),
        (BesselProduct::new(1, 5, 0, 1, 0), "2.51532011887066138290498867136071318376082885"),
    ];
    for (f, want) in cases {
        check(&f.to_string(), &moment(&f, &p).unwrap().value, want, 38);
    }
}

#[test]
fn normalized_seeds() {
    let p = Precision::digits(30);
    for kappa in 3..=5u32 {
        let v = normalized_moment(kappa, kappa - 1, kappa - 1, &p).unwrap().value;
        let f: u32 = (1..=kappa).product();
        let want = Float::with_val(p.bits(), 1) / f;
        assert!(v.contains(&want) || Float::with_val(p.bits(), v.value() - &want).abs() < 1e-28);
    }
}
