//! Higher-order recursions for `x(k) = I_{2k,0}^(kappa)` built from the
//! two-step map of the even sub-family.

use rug::{Float, Integer, Rational};
use serde::Serialize;

use super::poly::{IntPoly, QPoly, RatFunc};
use super::catalog_entry;
use crate::error::{Error, Result};
use crate::quadrature::normalized_moment;
use crate::real::{BigReal, Precision};

type RatMat = Vec<Vec<RatFunc>>;

fn lin(c0: i64, c1: i64) -> QPoly {
    QPoly::from_i64(&[c0, c1])
}

fn rf(num: QPoly, den: QPoly) -> RatFunc {
    RatFunc::new(num, den)
}

/// Two-step coefficients at `n = 2k` on `(I_{n+2,j-2}, I_{n+2,j}, I_{n+2,j+2})`.
fn two_step_sym(kappa: i64, j: i64) -> [RatFunc; 3] {
    let pre = &lin(1, 2) * &lin(2, 2);
    let d1 = lin(2 - j, 2);
    let d2 = lin(4 - j, 2);
    let c = |x: i64| QPoly::from_i64(&[x]);
    let lower = rf(&pre * &c((j - 1) * j), &d1 * &d2);
    let mid = &rf(pre.clone(), d1.clone())
        * &(&rf(c((j + 1) * (kappa - j)), d1.clone()) + &rf(c(j * (kappa - j + 1)), d2));
    let upper = rf(&pre * &c((kappa - j - 1) * (kappa - j)), &d1 * &d1);
    [lower, mid, upper]
}

/// Map `X(k) = M(k) X(k+1)` on `X(k) = (I_{2k,j})` for even `j`, with
/// `j = kappa - 2` removed through the even constraint when kappa is even.
/// Returns the retained `j` and the matrix.
pub fn reduced_two_step(kappa: u32) -> Result<(Vec<u32>, Vec<Vec<RatFunc>>)> {
    if kappa < 3 {
        return Err(Error::InvalidArgument(format!("needs kappa >= 3, got {kappa}")));
    }
    let k = kappa as i64;
    let js: Vec<i64> = (0..=k).step_by(2).collect();
    let dim = js.len();
    let mut t: RatMat = vec![vec![RatFunc::zero(); dim]; dim];
    for (r, &j) in js.iter().enumerate() {
        let [lo, mid, up] = two_step_sym(k, j);
        if r > 0 {
            t[r][r - 1] = lo;
        }
        t[r][r] = mid;
        if r + 1 < dim {
            t[r][r + 1] = up;
        }
    }
    if kappa % 2 == 1 {
        return Ok((js.iter().map(|&j| j as u32).collect(), t));
    }
    // sum_l (-1)^l C(h,l) (2k + 4 - 2l) I_{2k+2,2l} = 0 at level 2k + 2
    let h = kappa / 2;
    let drop = dim - 2;
    let cons: Vec<QPoly> = (0..dim)
        .map(|l| {
            let b = Integer::from(Integer::binomial_u(h, l as u32)).to_i64().unwrap_or(0);
            let s = if l % 2 == 1 { -b } else { b };
            lin(s * (4 - 2 * l as i64), 2 * s)
        })
        .collect();
    let keep: Vec<usize> = (0..dim).filter(|&i| i != drop).collect();
    let sub: Vec<RatFunc> = keep
        .iter()
        .map(|&l| -&rf(cons[l].clone(), cons[drop].clone()))
        .collect();
    let m: RatMat = keep
        .iter()
        .map(|&r| {
            keep.iter()
                .enumerate()
                .map(|(ci, &c)| &t[r][c] + &(&t[r][drop] * &sub[ci]))
                .collect()
        })
        .collect();
    Ok((keep.iter().map(|&i| js[i] as u32).collect(), m))
}

/// Eigenvalues of the reduced map at `k`, for two-dimensional maps, largest first.
fn eigen2(m: &[Vec<RatFunc>], k: i64) -> Result<[f64; 2]> {
    let kq = Rational::from(k);
    let at = |r: usize, c: usize| -> Result<f64> {
        m[r][c]
            .eval(&kq)
            .map(|q| q.to_f64())
            .ok_or_else(|| Error::Evaluation(format!("pole of the two-step map at k = {k}")))
    };
    let (a, b, c, d) = (at(0, 0)?, at(0, 1)?, at(1, 0)?, at(1, 1)?);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    Ok([(tr + disc) / 2.0, (tr - disc) / 2.0])
}

/// Richardson-extrapolated eigenvalues of the reduced two-step map from
/// `k_max/4`, `k_max/2`, `k_max`. Only two-dimensional maps (kappa 3, 4).
pub fn reduced_two_step_eigenvalues(kappa: u32, k_max: i64) -> Result<[f64; 2]> {
    let (_, m) = reduced_two_step(kappa)?;
    if m.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue extrapolation handles two-dimensional maps, kappa = {kappa} gives {}",
            m.len()
        )));
    }
    if k_max < 8 {
        return Err(Error::InvalidArgument("k_max must be at least 8".into()));
    }
    let e0 = eigen2(&m, k_max / 4)?;
    let e1 = eigen2(&m, k_max / 2)?;
    let e2 = eigen2(&m, k_max)?;
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = super::richardson(e0[i], e1[i], e2[i]);
    }
    Ok(out)
}

fn mat_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let mut s = RatFunc::zero();
                    for (k, x) in a[r].iter().enumerate() {
                        if !x.is_zero() && !b[k][c].is_zero() {
                            s = &s + &(x * &b[k][c]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn shift_mat(m: &RatMat, s: i64) -> RatMat {
    m.iter().map(|row| row.iter().map(|x| x.shift(s)).collect()).collect()
}

/// Solve `a x = b` over rational functions.
fn solve(mut a: RatMat, mut b: Vec<RatFunc>) -> Result<Vec<RatFunc>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !a[r][c].is_zero())
            .ok_or_else(|| Error::Structural("singular elimination system".into()))?;
        a.swap(p, c);
        b.swap(p, c);
        let inv = a[c][c].recip();
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] = &a[r][k] - &t;
            }
            let t = &f * &b[c];
            b[r] = &b[r] - &t;
        }
    }
    Ok((0..n).map(|i| &b[i] * &a[i][i].recip()).collect())
}

/// Coefficients `c_i(k)` with `sum_i c_i(k) x(k+i) = 0`, `i = 0..=r`, as
/// jointly primitive integer polynomials.
fn construct(kappa: u32) -> Result<Vec<IntPoly>> {
    let (_, m) = reduced_two_step(kappa)?;
    let r = m.len();
    // S_i = M(k+i) ... M(k+r-1), S_r = identity; x(k+i) = e0^T S_i X(k+r)
    let ident: RatMat = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { RatFunc::constant(Rational::from(1)) } else { RatFunc::zero() })
                .collect()
        })
        .collect();
    let mut rows = vec![ident[0].clone(); r + 1];
    let mut s = ident;
    for i in (0..r).rev() {
        s = mat_mul(&shift_mat(&m, i as i64), &s);
        rows[i] = s[0].clone();
    }
    // sum_{i>=1} c_i rows_i = -rows_0, componentwise
    let a: RatMat = (0..r).map(|comp| (1..=r).map(|i| rows[i][comp].clone()).collect()).collect();
    let b: Vec<RatFunc> = (0..r).map(|comp| -&rows[0][comp]).collect();
    let mut c = vec![RatFunc::constant(Rational::from(1))];
    c.extend(solve(a, b)?);
    // clear denominators and common polynomial factors
    let mut l = QPoly::from_i64(&[1]);
    for x in &c {
        let g = QPoly::gcd(&l, &x.den);
        l = (&l * &x.den).div_rem(&g).0;
    }
    let polys: Vec<QPoly> = c.iter().map(|x| (&x.num * &l).div_rem(&x.den).0).collect();
    let mut g = polys[0].clone();
    for p in &polys[1..] {
        g = QPoly::gcd(&g, p);
    }
    let polys: Vec<QPoly> = polys.iter().map(|p| p.div_rem(&g).0).collect();
    Ok(joint_primitive(&polys))
}

fn joint_primitive(polys: &[QPoly]) -> Vec<IntPoly> {
    let mut l = Integer::from(1);
    for p in polys {
        for c in p.coeffs() {
            l.lcm_mut(c.denom());
        }
    }
    let ints: Vec<Vec<Integer>> = polys
        .iter()
        .map(|p| {
            p.coeffs()
                .iter()
                .map(|c| c.numer() * Integer::from(&l / c.denom()))
                .collect()
        })
        .collect();
    let mut g = Integer::new();
    for v in &ints {
        for c in v {
            g.gcd_mut(c);
        }
    }
    if polys.last().is_some_and(|p| p.leading() < 0) {
        g = -g;
    }
    ints.into_iter()
        .map(|v| IntPoly::new(v.into_iter().map(|c| c.div_exact(&g)).collect()))
        .collect()
}

fn shift_int(p: &IntPoly, s: i64) -> IntPoly {
    let q = p.to_qpoly().shift(s);
    IntPoly::new(q.coeffs().iter().map(|c| c.numer().clone()).collect())
}

/// The printed recursions, coefficients of `x(k-1), x(k), ...`.
pub fn published_recurrence(kappa: u32) -> Result<Vec<IntPoly>> {
    match kappa {
        // k^4 x(k-1) - (2k-1)(2k+1)(2+5k+5k^2) x(k) + 16(1+k)^2 x(k+1) = 0
        4 => Ok(vec![
            IntPoly::from_i64(&[0, 0, 0, 0, 1]),
            -&IntPoly::product(&[&[-1, 2], &[1, 2], &[2, 5, 5]]),
            IntPoly::product(&[&[1, 1], &[1, 1]]).scale(16),
        ]),
        5 => {
            let outer = IntPoly::from_i64(&[-1, 2]);
            let mid = IntPoly::product(&[&[1, 1], &[1, 2]]);
            Ok(vec![
                IntPoly::from_i64(&[0, 0, 0, 0, 0, 8]),
                -&(&outer * &IntPoly::from_i64(&[5, 28, 63, 70, 35]).scale(4)),
                &(&outer * &mid) * &IntPoly::from_i64(&[285, 518, 259]).scale(2),
                -&(&(&outer * &mid) * &IntPoly::product(&[&[2, 1], &[3, 2]]).scale(225)),
            ])
        }
        _ => Err(Error::InvalidArgument(format!("printed recursions exist for kappa 4 and 5, got {kappa}"))),
    }
}

fn proportional(a: &[IntPoly], b: &[IntPoly]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

#[derive(Clone, Debug, Serialize)]
pub struct HigherOrderReport {
    pub kappa: u32,
    /// Coefficients of `x(k-1), x(k), ...` from the symbolic construction.
    pub constructed: Vec<IntPoly>,
    pub published: Vec<IntPoly>,
    pub matches_published: bool,
    /// `(k, residual)` of the constructed recursion on quadrature values.
    pub residuals: Vec<(i64, String)>,
    pub max_residual: f64,
    /// Largest residual of the printed recursion on the same values.
    pub published_max_residual: f64,
    pub tolerance: f64,
    pub digits: u32,
    pub passed: bool,
}

/// Construct the recursion for `kappa` in {4, 5}, compare with the printed
/// one and evaluate residuals on `x(k) = I_{2k,0}^(kappa)` for `k` in `ks`.
pub fn higher_order_recurrence(
    kappa: u32,
    ks: std::ops::RangeInclusive<i64>,
    prec: &Precision,
    tolerance: f64,
) -> Result<HigherOrderReport> {
    let published = published_recurrence(kappa)?;
    let constructed: Vec<IntPoly> = construct(kappa)?.iter().map(|p| shift_int(p, -1)).collect();
    let matches_published = proportional(&constructed, &published);
    if *ks.start() < 1 {
        return Err(Error::InvalidArgument("k must start at 1 or later".into()));
    }
    let order = constructed.len() as i64 - 1;
    let top = *ks.end() + order - 1;
    let work = prec.with_extra(5);
    let mut xs = Vec::new();
    for k in 0..=top {
        xs.push(normalized_moment(kappa, 2 * k as u32, 0, &work)?.value);
    }
    let bits = work.bits();
    let residual = |rec: &[IntPoly], k: i64| -> BigReal {
        let mut acc = BigReal::exact(Float::with_val(bits, 0));
        for (i, c) in rec.iter().enumerate() {
            let x = &xs[(k - 1) as usize + i];
            let coef = BigReal::from_integer(&c.eval_i64(k), bits);
            acc = &acc + &(&coef * x);
        }
        acc
    };
    let mut residuals = Vec::new();
    let mut max_residual = 0.0f64;
    let mut published_max_residual = 0.0f64;
    for k in ks {
        let acc = residual(&constructed, k);
        max_residual = max_residual.max(acc.value().to_f64().abs());
        residuals.push((k, acc.to_decimal(6)));
        let p = residual(&published, k).value().to_f64().abs();
        published_max_residual = published_max_residual.max(p);
    }
    Ok(HigherOrderReport {
        kappa,
        constructed,
        published,
        matches_published,
        residuals,
        max_residual,
        published_max_residual,
        tolerance,
        digits: prec.target_digits,
        passed: max_residual <= tolerance,
    })
}

/// Outcome of rescaling the kappa 4 recursion by `w(k) = 8^k (2k)! k!` and
/// comparing with the `zeta3_kappa4` recurrence.
#[derive(Clone, Debug, Serialize)]
pub struct TildeCheck {
    /// The rescaled constructed recursion is the three-term recurrence.
    pub holds: bool,
    /// Same test for the printed recursion.
    pub published_holds: bool,
    /// Ratios of rescaled printed to expected coefficient for `x(k-1)` and
    /// `x(k)`, normalized on the `x(k+1)` coefficient, at the first few `k`.
    pub published_ratios: Vec<(i64, String, String)>,
}

pub fn tilde_rescaling_check(k_max: i64) -> Result<TildeCheck> {
    let constructed: Vec<IntPoly> = construct(4)?.iter().map(|p| shift_int(p, -1)).collect();
    let (holds, _) = rescaled_against_kappa4(&constructed, k_max)?;
    let (published_holds, published_ratios) =
        rescaled_against_kappa4(&published_recurrence(4)?, k_max)?;
    Ok(TildeCheck {
        holds,
        published_holds,
        published_ratios,
    })
}

type Ratios = Vec<(i64, String, String)>;

fn rescaled_against_kappa4(rec: &[IntPoly], k_max: i64) -> Result<(bool, Ratios)> {
    let spec = catalog_entry("zeta3_kappa4")?;
    let w = |k: i64| -> Rational {
        let k = k as u32;
        Rational::from(
            Integer::from(Integer::u_pow_u(8, k))
                * Integer::from(Integer::factorial(2 * k))
                * Integer::from(Integer::factorial(k)),
        )
    };
    let mut holds = true;
    let mut ratios = Vec::new();
    for k in 1..=k_max {
        // coefficients on xt(k-1), xt(k), xt(k+1) after x = xt / w
        let t: Vec<Rational> = (0..3)
            .map(|i| Rational::from(rec[i].eval_i64(k)) / w(k - 1 + i as i64))
            .collect();
        let lead = t[2].clone();
        let tm = Rational::from(&t[0] / &lead);
        let t0 = Rational::from(&t[1] / &lead);
        // expected: y(k+1) - D(k) y(k) - N(k) y(k-1)
        let em = Rational::from(-spec.numerator.eval_i64(k));
        let e0 = Rational::from(-spec.denominator.eval_i64(k));
        let rm = tm / em;
        let r0 = t0 / e0;
        if rm != 1 || r0 != 1 {
            holds = false;
        }
        if k <= 5 {
            ratios.push((k, rm.to_string(), r0.to_string()));
        }
    }
    Ok((holds, ratios))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::momentalg::two_step_coeffs;

    #[test]
    fn symbolic_two_step_matches_exact() {
        for kappa in [4i64, 5, 6] {
            for j in (0..=kappa).step_by(2) {
                let s = two_step_sym(kappa, j);
                for k in 3..6i64 {
                    let e = two_step_coeffs(kappa as u32, 2 * k as u32, j as u32).unwrap();
                    for i in 0..3 {
                        assert_eq!(s[i].eval(&Rational::from(k)).unwrap(), e[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_five_matrix() {
        let (js, m) = reduced_two_step(5).unwrap();
        assert_eq!(js, vec![0, 2, 4]);
        let k = Rational::from(7);
        let at = |r: usize, c: usize| m[r][c].eval(&k).unwrap();
        assert_eq!(at(0, 0), Rational::from((5 * 15, 2 * 8)));
        assert_eq!(at(1, 1), Rational::from((15 * (9 + 119), 2 * 49)));
        assert_eq!(at(2, 2), Rational::from((8 * 15 * (-8 + 91), 2 * 7 * 36)));
        assert_eq!(at(0, 2), 0);
    }

    #[test]
    fn kappa_four_leading_coefficient() {
        // the x(k+1) coefficient carries the factor (2k-1)(2k+1)
        let c: Vec<IntPoly> = construct(4).unwrap().iter().map(|p| shift_int(p, -1)).collect();
        let p = published_recurrence(4).unwrap();
        let f = IntPoly::product(&[&[-1, 2], &[1, 2]]);
        let fixed = vec![p[0].clone(), p[1].clone(), &p[2] * &f];
        assert!(proportional(&c, &fixed));
    }

    #[test]
    fn constructed_matches_published() {
        for kappa in [4u32, 5] {
            let c: Vec<IntPoly> = construct(kappa).unwrap().iter().map(|p| shift_int(p, -1)).collect();
            let p = published_recurrence(kappa).unwrap();
            assert_eq!(proportional(&c, &p), kappa == 5, "kappa {kappa}");
        }
    }

    #[test]
    fn tilde_rescaling() {
        let t = tilde_rescaling_check(12).unwrap();
        assert!(t.holds);
        assert!(!t.published_holds);
        // ratio (4k^2-1) on both lower coefficients at k = 1
        assert_eq!(t.published_ratios[0].1, "3");
        assert_eq!(t.published_ratios[0].2, "3");
    }

    #[test]
    fn quadrature_residuals() {
        let r = higher_order_recurrence(4, 2..=4, &Precision::digits(40), 1e-30).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.published_max_residual > 1e-12);
        let r = higher_order_recurrence(5, 1..=2, &Precision::digits(40), 1e-30).unwrap();
        assert!(r.passed && r.matches_published, "{r:?}");
    }

    #[test]
    fn two_step_spectrum() {
        let e = reduced_two_step_eigenvalues(4, 200).unwrap();
        assert!((e[0] - 16.0).abs() < 1e-3 * 16.0, "{e:?}");
        assert!((e[1] - 4.0).abs() < 1e-3 * 4.0, "{e:?}");
    }
}
