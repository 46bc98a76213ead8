//! Riemann zeta at integers via the alternating eta series with Borwein's
//! acceleration, and the trigamma function at positive rationals.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Terms needed so that `3 / (3 + sqrt 8)^n` is below `2^-bits`.
fn borwein_terms(bits: u32) -> u32 {
    ((bits as f64 + 4.0) * std::f64::consts::LN_2 / (3.0 + 8f64.sqrt()).ln()).ceil() as u32 + 2
}

/// `d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)`, all exact integers.
fn borwein_d(n: u32) -> Vec<Integer> {
    let mut d = Vec::with_capacity(n as usize + 1);
    // term_i = n (n+i-1)! 4^i / ((n-i)! (2i)!) built by ratios
    let mut term = Rational::from(1);
    let mut acc = Integer::new();
    for i in 0..=n {
        if i > 0 {
            // term_i / term_{i-1} = (n+i-1)(n-i+1) 4 / ((2i)(2i-1))
            term *= Rational::from((
                Integer::from(n + i - 1) * (n - i + 1) * 4u32,
                Integer::from(2 * i) * (2 * i - 1),
            ));
        }
        // term_0 = n (n-1)! / n! = 1
        debug_assert!(term.denom() == &1);
        acc += term.numer();
        d.push(acc.clone());
    }
    d
}

/// `zeta(s)` for integer `s >= 2` at working precision `bits`, and an error bound.
pub(crate) fn zeta_float(s: u32, bits: u32) -> (Float, Float) {
    let wp = bits + 32;
    let n = borwein_terms(wp);
    let d = borwein_d(n);
    let dn = &d[n as usize];
    let mut sum = Float::with_val(wp, 0);
    for k in 0..n {
        let num = Integer::from(&d[k as usize] - dn);
        let den = Integer::from(k + 1).pow(s);
        let term = Float::with_val(wp, Rational::from((num, den)));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum /= Float::with_val(wp, dn);
    // eta(s) = -sum; zeta = eta / (1 - 2^{1-s})
    let mut factor = Float::with_val(wp, 1);
    factor >>= (s - 1) as i32;
    let factor = Float::with_val(wp, 1) - factor;
    let zeta = Float::with_val(wp, -sum) / &factor;
    // |eta error| <= 3 / (3 + sqrt 8)^n; divided by factor >= 1/2
    let mut err = Float::with_val(64, 3.0 + 8f64.sqrt()).pow(-(n as i32)) * 6u32;
    let mut ulp = Float::with_val(64, 1);
    ulp >>= (bits as i32) - 4;
    err += ulp;
    (Float::with_val(bits, zeta), err)
}

/// Bernoulli numbers `B_0..=B_m` via the standard recurrence.
pub(crate) fn bernoulli(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    b.push(Rational::from(1));
    for n in 1..=m {
        let mut s = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            s += Rational::from(&binom * bk.numer()) / bk.denom();
            binom *= (n + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        b.push(-s / Rational::from(n as u32 + 1));
    }
    b
}

/// Trigamma `psi_1(z) = sum_{k>=0} 1/(z+k)^2` for rational `z > 0`: direct
/// summation followed by an Euler-Maclaurin tail.
pub(crate) fn trigamma_float(z: &Rational, bits: u32) -> (Float, Float) {
    let wp = bits + 32;
    let digits = bits as f64 / std::f64::consts::LOG2_10;
    let n = (0.5 * digits).ceil() as u32 + 8;
    let mut sum = Float::with_val(wp, 0);
    for k in 0..n {
        let zk = Float::with_val(wp, Rational::from(z + Integer::from(k)));
        sum += Float::with_val(wp, zk.square_ref()).recip();
    }
    // tail: sum_{k>=0} 1/(x+k)^2 = 1/x + 1/(2x^2) + sum_j B_{2j} / x^{2j+1} + R
    let x = Float::with_val(wp, Rational::from(z + Integer::from(n)));
    let xr = Float::with_val(wp, x.recip_ref());
    let xr2 = Float::with_val(wp, xr.square_ref());
    let mut tail = Float::with_val(wp, &xr + Float::with_val(wp, &xr2 / 2u32));
    let mut eps = Float::with_val(wp, 1);
    eps >>= wp as i32;
    let mut pw = Float::with_val(wp, &xr2 * &xr);
    let max_j = (2.0 * std::f64::consts::PI * x.to_f64()) as usize / 2;
    let b = bernoulli(2 * max_j.max(2) + 2);
    let mut bound = Float::with_val(64, 0);
    for j in 1..=max_j.max(1) {
        let t = Float::with_val(wp, &b[2 * j] * &pw);
        let next = Float::with_val(64, &b[2 * j + 2] * Float::with_val(wp, &pw * &xr2)).abs();
        tail += &t;
        bound = next;
        if bound < eps {
            break;
        }
        pw *= &xr2;
    }
    sum += tail;
    let mut ulp = Float::with_val(64, 1);
    ulp >>= (bits as i32) - 4;
    let err = Float::with_val(64, &bound * 2u32) + ulp;
    (Float::with_val(bits, sum), err)
}
