//! Exact rational algebra of the normalized moments
//! `I_{n,j}^(kappa) = (1/n!) int u^{n+1} K0^{kappa-j} K1^j du`.

mod decompose;
pub mod linalg;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use decompose::{basis_exponents, decompose, BasisDecomposition};
pub use linalg::{determinant, RatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MomentIndex {
    pub kappa: u32,
    pub n: u32,
    pub j: u32,
}

impl MomentIndex {
    pub fn new(kappa: u32, n: u32, j: u32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::Domain("kappa must be at least 1".into()));
        }
        if j > kappa {
            return Err(Error::Domain(format!("j = {j} exceeds kappa = {kappa}")));
        }
        if n + 1 < j {
            return Err(Error::Domain(format!("I_{{{n},{j}}} diverges: needs n >= j - 1")));
        }
        Ok(MomentIndex { kappa, n, j })
    }

    /// `(n - j) mod 2`.
    pub fn parity(&self) -> u32 {
        (self.n + self.j) % 2
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Matrix `M` with `I_{n,.} = M I_{n+1,.}` from integration by parts.
pub fn step_matrix(kappa: u32, n: u32) -> Result<RatMatrix> {
    if kappa == 0 {
        return Err(Error::Domain("kappa must be at least 1".into()));
    }
    if n + 2 <= kappa {
        return Err(Error::Structural(format!(
            "row j = {} of the step matrix has zero denominator n - j + 2 at n = {n}",
            n + 2
        )));
    }
    let k = kappa as usize;
    let (n, kap) = (n as i64, kappa as i64);
    let mut m = vec![vec![Rational::new(); k + 1]; k + 1];
    for j in 0..=k {
        let ji = j as i64;
        let den = n - ji + 2;
        if j > 0 {
            m[j][j - 1] = q((n + 1) * ji, den);
        }
        if j < k {
            m[j][j + 1] = q((n + 1) * (kap - ji), den);
        }
    }
    Ok(m)
}

/// Coefficients of `sum_l (-1)^l (n - 2l + 2) C(kappa/2, l) I_{n,2l} = 0` on
/// `(I_{n,0}, I_{n,2}, ..., I_{n,kappa})`.
pub fn even_constraint(kappa: u32, n: u32) -> Result<Vec<Integer>> {
    if kappa % 2 == 1 || kappa == 0 {
        return Err(Error::Domain(format!("the even constraint needs even kappa, got {kappa}")));
    }
    let half = kappa / 2;
    Ok((0..=half)
        .map(|l| {
            let c = Integer::from(Integer::binomial_u(half, l)) * (n as i64 - 2 * l as i64 + 2);
            if l % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect())
}

/// Coefficients of `I_{n,j}` on `(I_{n+2,j-2}, I_{n+2,j}, I_{n+2,j+2})`.
pub fn two_step_coeffs(kappa: u32, n: u32, j: u32) -> Result<[Rational; 3]> {
    let (k, n, j) = (kappa as i64, n as i64, j as i64);
    let d1 = n - j + 2;
    let d2 = n - j + 4;
    if d1 == 0 || d2 == 0 {
        return Err(Error::Structural(format!(
            "two-step map has zero denominator at n = {n}, j = {j}"
        )));
    }
    let pre = (n + 1) * (n + 2);
    let lower = q(pre * (j - 1) * j, d1 * d2);
    let mid = q(pre, d1) * (q((j + 1) * (k - j), d1) + q(j * (k - j + 1), d2));
    let upper = q(pre * (k - j - 1) * (k - j), d1 * d1);
    Ok([lower, mid, upper])
}

/// Exact value of `det(step_matrix(kappa, n))` for odd kappa:
/// `(-1)^((kappa+1)/2) (kappa!!)^2 (n+1)^(kappa+1) / prod_{j=0}^{kappa} (n - j + 2)`.
pub fn odd_step_determinant(kappa: u32, n: u32) -> Result<Rational> {
    if kappa.is_multiple_of(2) {
        return Err(Error::Domain(format!("closed form needs odd kappa, got {kappa}")));
    }
    let mut df = Integer::from(1);
    let mut i = kappa;
    while i > 1 {
        df *= i;
        i -= 2;
    }
    let mut den = Integer::from(1);
    for j in 0..=kappa as i64 {
        den *= n as i64 - j + 2;
    }
    if den == 0 {
        return Err(Error::Structural(format!("zero denominator at n = {n}")));
    }
    let num = Integer::from(df.square_ref()) * Integer::from(Integer::u_pow_u(n + 1, kappa + 1));
    let mut r = Rational::from((num, den));
    if kappa.div_ceil(2) % 2 == 1 {
        r = -r;
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct AsymptoticSpectrum {
    /// `kappa^2, (kappa-2)^2, ...` with a zero eigenvalue removed for even kappa.
    pub eigenvalues: Vec<u64>,
    /// Limiting two-step map on `j = 0, 2, 4, ...`.
    pub limit_matrix: RatMatrix,
    /// Every listed eigenvalue is a root of the characteristic polynomial.
    pub verified: bool,
    /// The all-ones vector is an eigenvector for `kappa^2`.
    pub ones_certificate: bool,
}

/// Spectrum of the `n -> infinity` limit of the two-step map.
pub fn asymptotic_eigenvalues(kappa: u32) -> Result<AsymptoticSpectrum> {
    if kappa == 0 {
        return Err(Error::Domain("kappa must be at least 1".into()));
    }
    let k = kappa as i64;
    let js: Vec<i64> = (0..=k).step_by(2).collect();
    let dim = js.len();
    let mut m = vec![vec![Rational::new(); dim]; dim];
    for (r, &j) in js.iter().enumerate() {
        if r > 0 {
            m[r][r - 1] = Rational::from((j - 1) * j);
        }
        m[r][r] = Rational::from(2 * j * (k - j) + k);
        if r + 1 < dim {
            m[r][r + 1] = Rational::from((k - j - 1) * (k - j));
        }
    }
    let all: Vec<u64> = (0..dim).map(|i| ((k - 2 * i as i64).pow(2)) as u64).collect();
    let verified = all.iter().all(|&lam| {
        let mut a = m.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= lam;
        }
        determinant(&a) == 0
    });
    let ones = vec![Rational::from(1); dim];
    let image = linalg::mat_vec(&m, &ones);
    let ones_certificate = image.iter().all(|v| *v == k * k);
    let eigenvalues = all.into_iter().filter(|&l| l != 0).collect();
    Ok(AsymptoticSpectrum {
        eigenvalues,
        limit_matrix: m,
        verified,
        ones_certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_matrix_band() {
        let m = step_matrix(5, 6).unwrap();
        for (j, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let band = c + 1 == j || c == j + 1;
                if !band {
                    assert_eq!(*v, 0);
                }
            }
        }
        assert_eq!(m[0][1], q(5 * 7, 8));
        assert_eq!(m[1][0], 1);
        assert_eq!(m[1][2], 4);
        assert!(step_matrix(4, 2).is_err());
    }

    #[test]
    fn odd_determinant_closed_form() {
        for kappa in [1u32, 3, 5, 7] {
            for n in kappa - 1..kappa + 8 {
                let d = determinant(&step_matrix(kappa, n).unwrap());
                assert_eq!(d, odd_step_determinant(kappa, n).unwrap(), "kappa {kappa} n {n}");
            }
        }
    }

    #[test]
    fn even_determinant_vanishes() {
        for kappa in [2u32, 4, 6] {
            for n in kappa - 1..kappa + 6 {
                assert_eq!(determinant(&step_matrix(kappa, n).unwrap()), 0);
            }
        }
    }

    #[test]
    fn kappa_four_constraint() {
        let n = 7;
        let c = even_constraint(4, n).unwrap();
        assert_eq!(c, vec![Integer::from(n + 2), Integer::from(-2 * n as i32), Integer::from(n - 2)]);
        // I_{2,0}^(2) = 1/6 and I_{2,2}^(2) = 1/3
        let c = even_constraint(2, 2).unwrap();
        assert_eq!(c, vec![Integer::from(4), Integer::from(-2)]);
        assert!(even_constraint(3, 4).is_err());
    }

    #[test]
    fn constraint_is_left_kernel() {
        for kappa in [2u32, 4, 6, 8] {
            for n in kappa..kappa + 6 {
                let c = even_constraint(kappa, n).unwrap();
                let mut v = vec![Rational::new(); kappa as usize + 1];
                for (l, x) in c.into_iter().enumerate() {
                    v[2 * l] = Rational::from(x);
                }
                let m = step_matrix(kappa, n).unwrap();
                assert!(linalg::vec_mat(&v, &m).iter().all(|x| *x == 0));
            }
        }
    }

    #[test]
    fn two_steps_compose() {
        for kappa in [3u32, 4, 5, 6] {
            for n in kappa - 1..kappa + 5 {
                let m = linalg::mat_mul(&step_matrix(kappa, n).unwrap(), &step_matrix(kappa, n + 1).unwrap());
                for j in 0..=kappa as usize {
                    let c = two_step_coeffs(kappa, n, j as u32).unwrap();
                    for (col, v) in m[j].iter().enumerate() {
                        let expect = match col as i64 - j as i64 {
                            -2 => c[0].clone(),
                            0 => c[1].clone(),
                            2 => c[2].clone(),
                            _ => Rational::new(),
                        };
                        assert_eq!(*v, expect, "kappa {kappa} n {n} j {j} col {col}");
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_three_two_step_matrix() {
        // n -> n+2 map on (I_{n,0}, I_{n,2}) for kappa = 3
        let n = 4u32;
        let nn = n as i64;
        let c0 = two_step_coeffs(3, n, 0).unwrap();
        let c2 = two_step_coeffs(3, n, 2).unwrap();
        assert_eq!(c0[1], q(3 * (nn + 1), nn + 2));
        assert_eq!(c0[2], q(6 * (nn + 1), nn + 2));
        assert_eq!(c2[0], q(2 * (nn + 1), nn));
        assert_eq!(c2[1], q((nn + 1) * (6 + 7 * nn), nn * nn));
    }

    #[test]
    fn kappa_four_reduced_map() {
        // eliminate I_{n+2,2} with the even constraint at level n+2
        for n in [4u32, 6, 10] {
            let nn = n as i64;
            let c = two_step_coeffs(4, n, 0).unwrap();
            let via = q(nn + 4, 2 * (nn + 2));
            let on_i0 = c[1].clone() + c[2].clone() * &via;
            assert_eq!(on_i0, q((nn + 1) * (32 + 10 * nn), (nn + 2) * (nn + 2)));
            let on_i4 = c[2].clone() * q(nn, 2 * (nn + 2));
            assert_eq!(on_i4, q((nn + 1) * 6 * nn, (nn + 2) * (nn + 2)));
        }
    }

    #[test]
    fn eigenvalues() {
        let s = asymptotic_eigenvalues(4).unwrap();
        assert_eq!(s.eigenvalues, vec![16, 4]);
        assert!(s.verified && s.ones_certificate);
        let s = asymptotic_eigenvalues(3).unwrap();
        assert_eq!(s.eigenvalues, vec![9, 1]);
        assert!(s.verified && s.ones_certificate);
        for k in 1..=9 {
            let s = asymptotic_eigenvalues(k).unwrap();
            assert!(s.verified && s.ones_certificate, "kappa {k}");
        }
    }

    #[test]
    fn index_validation() {
        assert!(MomentIndex::new(4, 0, 2).is_err());
        assert!(MomentIndex::new(4, 1, 5).is_err());
        assert_eq!(MomentIndex::new(4, 3, 1).unwrap().parity(), 0);
    }
}
