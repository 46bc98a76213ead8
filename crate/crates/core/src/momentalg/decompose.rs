//! Reduction of in-family moments onto `{1, int u K0^k, int u^3 K0^k, ...}`.

use rug::{Integer, Rational};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use super::linalg::{reduce, Row};
use super::{even_constraint, MomentIndex};
use crate::error::{Error, Result};
use crate::quadrature::{factorial, moment, BesselProduct};
use crate::real::{BigReal, Precision};

/// Odd exponents `m` of the basis moments `int u^m K0^kappa`.
pub fn basis_exponents(kappa: u32) -> Vec<u32> {
    let top = if kappa.is_multiple_of(2) { kappa as i64 - 3 } else { kappa as i64 - 2 };
    (1..=top.max(0) as u32).step_by(2).collect()
}

/// Exact coordinates of a moment over `1` and the basis moments.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisDecomposition {
    pub kappa: u32,
    pub coeff_one: Rational,
    /// `(m, c_m)` for every basis exponent in increasing order.
    pub coeffs: Vec<(u32, Rational)>,
}

impl BasisDecomposition {
    pub fn coeff(&self, m: u32) -> Rational {
        self.coeffs
            .iter()
            .find(|(e, _)| *e == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    pub fn scaled(&self, s: &Rational) -> BasisDecomposition {
        BasisDecomposition {
            kappa: self.kappa,
            coeff_one: Rational::from(&self.coeff_one * s),
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (*m, Rational::from(c * s)))
                .collect(),
        }
    }

    /// Numeric value from quadrature of the basis moments.
    pub fn evaluate(&self, prec: &Precision) -> Result<BigReal> {
        let bits = prec.bits();
        let mut acc = BigReal::from_rational(&self.coeff_one, bits);
        for (m, c) in &self.coeffs {
            if *c == 0 {
                continue;
            }
            let v = moment(&BesselProduct::k0_power(*m, self.kappa), prec)?;
            acc = &acc + &v.value.mul_rational(c);
        }
        Ok(acc)
    }
}

impl fmt::Display for BasisDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff_one)?;
        for (m, c) in &self.coeffs {
            let sign = if *c < 0 { "-" } else { "+" };
            write!(f, " {sign} {}*int(u^{m} K0^{})", Rational::from(c.abs_ref()), self.kappa)?;
        }
        Ok(())
    }
}

fn cache() -> &'static Mutex<HashMap<MomentIndex, BasisDecomposition>> {
    static C: OnceLock<Mutex<HashMap<MomentIndex, BasisDecomposition>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Decompose `I_{n,j}^(kappa)` with `n - j` even.
pub fn decompose(idx: &MomentIndex) -> Result<BasisDecomposition> {
    let idx = MomentIndex::new(idx.kappa, idx.n, idx.j)?;
    if idx.parity() == 1 {
        return Err(Error::UnsupportedSubfamily(format!(
            "I_{{{},{}}}^({}) has n - j odd; only the n - j even sub-family is reduced",
            idx.n, idx.j, idx.kappa
        )));
    }
    if let Some(d) = cache().lock().expect("decomposition cache").get(&idx) {
        return Ok(d.clone());
    }
    let solved = solve_family(idx.kappa, idx.n.max(idx.kappa) + 1)?;
    let mut c = cache().lock().expect("decomposition cache");
    for (k, v) in &solved {
        c.entry(*k).or_insert_with(|| v.clone());
    }
    c.get(&idx).cloned().ok_or_else(|| {
        Error::Structural(format!(
            "I_{{{},{}}}^({}) is not determined by the recurrences",
            idx.n, idx.j, idx.kappa
        ))
    })
}

/// Solve the recurrence system for all `n - j` even moments up to level `top`.
fn solve_family(kappa: u32, top: u32) -> Result<HashMap<MomentIndex, BasisDecomposition>> {
    let basis = basis_exponents(kappa);
    let basis_idx: Vec<MomentIndex> = basis
        .iter()
        .map(|&m| MomentIndex { kappa, n: m - 1, j: 0 })
        .collect();
    // unknowns: non-basis first (highest level first), then basis, then the constant
    let mut unknowns = Vec::new();
    for n in (0..=top).rev() {
        for j in 0..=kappa {
            let idx = MomentIndex { kappa, n, j };
            if (n + j) % 2 == 0 && n + 1 >= j && !basis_idx.contains(&idx) {
                unknowns.push(idx);
            }
        }
    }
    let n_free = unknowns.len();
    unknowns.extend(basis_idx.iter().copied());
    let col: HashMap<MomentIndex, usize> = unknowns.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let const_col = unknowns.len();

    let mut rows = Vec::new();
    let add = |row: &mut Row, idx: MomentIndex, c: Integer| {
        if c != 0 {
            *row.entry(col[&idx]).or_default() += c;
        }
    };
    for n in 0..top {
        for j in 0..=kappa {
            if (n + j) % 2 == 1 || n + 1 < j {
                continue;
            }
            // (n - j + 2) I_{n,j} - (n+1) j I_{n+1,j-1} - (n+1)(kappa - j) I_{n+1,j+1} = 0
            let mut row = Row::new();
            add(&mut row, MomentIndex { kappa, n, j }, Integer::from(n + 2 - j));
            if j > 0 {
                add(&mut row, MomentIndex { kappa, n: n + 1, j: j - 1 }, -Integer::from((n + 1) * j));
            }
            if j < kappa {
                add(
                    &mut row,
                    MomentIndex { kappa, n: n + 1, j: j + 1 },
                    -Integer::from((n + 1) * (kappa - j)),
                );
            }
            rows.push(row);
        }
    }
    if kappa.is_multiple_of(2) {
        for n in (kappa..=top).step_by(2) {
            let c = even_constraint(kappa, n)?;
            let mut row = Row::new();
            for (l, v) in c.into_iter().enumerate() {
                add(&mut row, MomentIndex { kappa, n, j: 2 * l as u32 }, v);
            }
            rows.push(row);
        }
    }
    // kappa! I_{kappa-1,kappa-1} = 1
    let mut seed = Row::new();
    add(&mut seed, MomentIndex { kappa, n: kappa - 1, j: kappa - 1 }, factorial(kappa));
    seed.insert(const_col, Integer::from(-1));
    rows.push(seed);

    let pivots = reduce(rows);
    if let Some(c) = pivots.keys().find(|&&c| c >= n_free) {
        return Err(Error::Structural(format!(
            "the recurrences force a relation among the basis elements (column {c})"
        )));
    }
    let mut out = HashMap::new();
    for (&c, row) in &pivots {
        if row.keys().any(|&k| k != c && k < n_free) {
            continue;
        }
        let p = &row[&c];
        let coord = |k: usize| -> Rational {
            row.get(&k)
                .map(|v| Rational::from((-v.clone(), p.clone())))
                .unwrap_or_default()
        };
        let coeffs = basis
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                // I_{m-1,0} = int u^m K0^kappa / (m-1)!
                let c = coord(n_free + i) / Rational::from(factorial(m - 1));
                (m, c)
            })
            .collect();
        out.insert(
            unknowns[c],
            BasisDecomposition {
                kappa,
                coeff_one: coord(const_col),
                coeffs,
            },
        );
    }
    for (i, b) in basis_idx.iter().enumerate() {
        let m = basis[i];
        let coeffs = basis
            .iter()
            .map(|&e| {
                let c = if e == m { Rational::from((1, factorial(m - 1))) } else { Rational::new() };
                (e, c)
            })
            .collect();
        out.insert(
            *b,
            BasisDecomposition {
                kappa,
                coeff_one: Rational::new(),
                coeffs,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn dec(k: u32, n: u32, j: u32) -> BasisDecomposition {
        decompose(&MomentIndex::new(k, n, j).unwrap()).unwrap()
    }

    #[test]
    fn basis_ranges() {
        assert_eq!(basis_exponents(4), vec![1]);
        assert_eq!(basis_exponents(6), vec![1, 3]);
        assert_eq!(basis_exponents(3), vec![1]);
        assert_eq!(basis_exponents(5), vec![1, 3]);
        assert!(basis_exponents(2).is_empty());
        assert!(basis_exponents(1).is_empty());
    }

    #[test]
    fn kappa_four_initial_conditions() {
        let a = dec(4, 4, 0);
        assert_eq!(a.coeff_one, q(-9, 512));
        assert_eq!(a.coeff(1), q(7, 384));
        let b = dec(4, 4, 4);
        assert_eq!(b.coeff_one, q(53, 1536));
        assert_eq!(b.coeff(1), q(-3, 128));
    }

    #[test]
    fn kappa_three_initial_conditions() {
        let a = dec(3, 2, 0);
        assert_eq!(a.coeff_one, q(-1, 3));
        assert_eq!(a.coeff(1), q(2, 3));
        let b = dec(3, 2, 2);
        assert_eq!(b.coeff_one, q(1, 6));
        assert_eq!(b.coeff(1), 0);
    }

    #[test]
    fn kappa_two_is_rational() {
        for n in [0u32, 2, 4] {
            let d = dec(2, n, 0);
            assert!(d.coeffs.is_empty());
        }
        // int u K0^2 = 1/2
        assert_eq!(dec(2, 0, 0).coeff_one, q(1, 2));
    }

    #[test]
    fn weight_six_relation() {
        // int u^3 K0^4 K1^2 = 2! I_{2,2}^(6)
        let d = dec(6, 2, 2).scaled(&Rational::from(2));
        assert_eq!(d.coeff_one, 0);
        assert_eq!(d.coeff(1), q(2, 15));
        assert_eq!(d.coeff(3), q(-1, 5));
    }

    #[test]
    fn odd_parity_rejected() {
        let e = decompose(&MomentIndex::new(4, 3, 0).unwrap());
        assert!(matches!(e, Err(Error::UnsupportedSubfamily(_))));
    }

    #[test]
    fn seed_value() {
        for k in 1..=7u32 {
            let d = dec(k, k - 1, k - 1);
            assert_eq!(d.coeff_one, Rational::from((1, factorial(k))));
            assert!(d.coeffs.iter().all(|(_, c)| *c == 0));
        }
    }

    #[test]
    fn kappa_four_identity() {
        // 4 int u K0^4 - 16 int u^3 K0^4 = 3, with int u^3 K0^4 = 2! I_{2,0}
        let d = dec(4, 2, 0).scaled(&Rational::from(2));
        assert_eq!(Rational::from(-16 * &d.coeff_one), 3);
        assert_eq!((4 - 16 * d.coeff(1)), 0);
    }
}
