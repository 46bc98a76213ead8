//! Special functions at arbitrary precision with error radii.

pub mod bessel;
mod zeta;

use rug::float::Constant;
use std::cell::RefCell;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::real::{BigReal, Precision};

pub use bessel::{bessel_set, BesselSet};
#[allow(unused_imports)]
pub(crate) use zeta::{bernoulli, trigamma_float, zeta_float};

fn relative_radius(v: &Float, bits: u32) -> Float {
    let mut r = Float::with_val(64, v.abs_ref());
    r >>= bits as i32 - 12;
    r
}

fn check_order(nu: u32) -> Result<()> {
    if nu > 1 {
        return Err(Error::Domain(format!("Bessel order {nu} is not supported (only 0 and 1)")));
    }
    Ok(())
}

/// `K_nu(x)` for `nu` in {0, 1} and `x > 0`.
pub fn bessel_k(nu: u32, x: &BigReal, prec: &Precision) -> Result<BigReal> {
    check_order(nu)?;
    if *x.value() <= 0 {
        return Err(Error::Domain(format!("K_{nu} needs x > 0, got {}", x.to_decimal(10))));
    }
    let bits = prec.bits();
    let s = bessel_set(x.value(), bits, false);
    // derivative bounds: K0' = -K1, K1' = -K0 - K1/x
    let (v, deriv) = if nu == 0 {
        (s.k0, Float::with_val(64, &s.k1))
    } else {
        let d = Float::with_val(64, &s.k1 / x.value()) + &s.k0;
        (s.k1, d)
    };
    let r = relative_radius(&v, bits) + Float::with_val(64, &deriv * x.radius()) * 1.01f64;
    Ok(BigReal::new(v, r))
}

/// `I_nu(x)` for `nu` in {0, 1} and `x >= 0`.
pub fn bessel_i(nu: u32, x: &BigReal, prec: &Precision) -> Result<BigReal> {
    check_order(nu)?;
    if *x.value() < 0 {
        return Err(Error::Domain(format!("I_{nu} needs x >= 0, got {}", x.to_decimal(10))));
    }
    let bits = prec.bits();
    if x.value().is_zero() && x.radius().is_zero() {
        return Ok(BigReal::exact(Float::with_val(bits, 1 - nu)));
    }
    let (i0, i1) = bessel::bessel_i_pair(x.value(), bits);
    // derivative bounds: I0' = I1, |I1'| <= I0
    let (v, deriv) = if nu == 0 {
        (i0, Float::with_val(64, &i1))
    } else {
        (i1, Float::with_val(64, &i0))
    };
    // widen the derivative bound over the radius of x
    let grow = Float::with_val(64, x.radius()).exp();
    let r = relative_radius(&v, bits) + Float::with_val(64, &deriv * x.radius()) * grow * 1.01f64;
    Ok(BigReal::new(v, r))
}

/// `zeta(s)` for integer `s >= 2`.
pub fn zeta(s: u32, prec: &Precision) -> Result<BigReal> {
    if s < 2 {
        return Err(Error::Domain(format!("zeta(s) needs integer s >= 2, got {s}")));
    }
    let (v, e) = zeta_float(s, prec.bits());
    Ok(BigReal::new(v, e))
}

/// Trigamma `psi_1(z)` at a positive rational.
pub fn polygamma1(z: &Rational, prec: &Precision) -> Result<BigReal> {
    if *z <= 0 {
        return Err(Error::Domain(format!("psi_1(z) needs z > 0, got {z}")));
    }
    let (v, e) = trigamma_float(z, prec.bits());
    Ok(BigReal::new(v, e))
}

/// `psi_1(1/3) - psi_1(2/3)`.
pub fn trigamma_third_difference(prec: &Precision) -> BigReal {
    let a = polygamma1(&Rational::from((1, 3)), prec).expect("positive argument");
    let b = polygamma1(&Rational::from((2, 3)), prec).expect("positive argument");
    &a - &b
}

thread_local! {
    static GAMMA: RefCell<Float> = RefCell::new(Float::with_val(64, Constant::Euler));
}

/// Euler's constant at `bits` precision, from a per-thread cache that only grows.
pub(crate) fn euler_gamma(bits: u32) -> Float {
    GAMMA.with(|g| {
        let mut g = g.borrow_mut();
        if g.prec() < bits + 16 {
            *g = Float::with_val((bits + 16).next_multiple_of(256), Constant::Euler);
        }
        Float::with_val(bits, &*g)
    })
}

/// `psi_0(1) = -gamma`.
pub fn digamma_at_one(prec: &Precision) -> BigReal {
    let g = euler_gamma(prec.bits());
    BigReal::rounded(-g)
}
