//! Exact linear algebra over the rationals.

use rug::{Integer, Rational};
use std::collections::BTreeMap;

pub type RatMatrix = Vec<Vec<Rational>>;

/// Determinant by Gaussian elimination with exact pivots.
pub fn determinant(m: &RatMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::from(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c] != 0) else {
            return Rational::new();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if a[r][c] == 0 {
                continue;
            }
            let f = Rational::from(&a[r][c] / &piv);
            for k in c..n {
                let t = Rational::from(&f * &a[c][k]);
                a[r][k] -= t;
            }
        }
    }
    det
}

/// `m * v` for a square matrix and a vector.
pub fn mat_vec(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| {
            let mut s = Rational::new();
            for (a, b) in row.iter().zip(v) {
                s += Rational::from(a * b);
            }
            s
        })
        .collect()
}

/// `v^T m`.
pub fn vec_mat(v: &[Rational], m: &RatMatrix) -> Vec<Rational> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|c| {
            let mut s = Rational::new();
            for (r, a) in v.iter().enumerate() {
                s += Rational::from(a * &m[r][c]);
            }
            s
        })
        .collect()
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut s = Rational::new();
                    for (k, x) in row.iter().enumerate() {
                        if *x != 0 {
                            s += Rational::from(x * &b[k][c]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Sparse integer row.
pub(crate) type Row = BTreeMap<usize, Integer>;

fn make_primitive(row: &mut Row) {
    let mut g = Integer::new();
    for v in row.values() {
        g.gcd_mut(v);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for v in row.values_mut() {
            v.div_exact_mut(&g);
        }
    }
}

/// `a * row - b * piv`, dropping zeros.
fn combine(row: &Row, a: &Integer, piv: &Row, b: &Integer) -> Row {
    let mut out = Row::new();
    for (&c, v) in row {
        out.insert(c, Integer::from(v * a));
    }
    for (&c, v) in piv {
        let t = Integer::from(v * b);
        let e = out.entry(c).or_default();
        *e -= t;
    }
    out.retain(|_, v| *v != 0);
    make_primitive(&mut out);
    out
}

/// Reduced echelon form of a sparse integer system, fraction free: rows are
/// kept primitive instead of divided by their pivots. Columns are pivoted in
/// increasing order, so low columns are eliminated first. Returns the map
/// from pivot column to its row.
pub(crate) fn reduce(mut rows: Vec<Row>) -> BTreeMap<usize, Row> {
    let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
    for mut r in rows.drain(..) {
        loop {
            r.retain(|_, v| *v != 0);
            let Some((&c, _)) = r.iter().next() else { break };
            match pivots.get(&c) {
                Some(p) => {
                    let a = p[&c].clone();
                    let b = r[&c].clone();
                    r = combine(&r, &a, p, &b);
                }
                None => {
                    make_primitive(&mut r);
                    if r[&c] < 0 {
                        for v in r.values_mut() {
                            *v = -std::mem::take(v);
                        }
                    }
                    pivots.insert(c, r);
                    break;
                }
            }
        }
    }
    // back substitution, highest pivot first
    let cols: Vec<usize> = pivots.keys().rev().copied().collect();
    for &c in &cols {
        let pr = pivots[&c].clone();
        let others: Vec<usize> = pivots.keys().copied().filter(|&k| k < c).collect();
        for k in others {
            let row = &pivots[&k];
            if let Some(v) = row.get(&c) {
                let b = v.clone();
                let a = pr[&c].clone();
                let new = combine(row, &a, &pr, &b);
                pivots.insert(k, new);
            }
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn small_determinants() {
        let m = vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(4, 1)]];
        assert_eq!(determinant(&m), -2);
        let m = vec![
            vec![q(0, 1), q(1, 2), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(3, 1)],
        ];
        assert_eq!(determinant(&m), q(-3, 2));
    }

    #[test]
    fn echelon_solves_system() {
        // x + y = 3, x - y = 1  with constant column 2
        let mut r1 = Row::new();
        r1.insert(0, Integer::from(1));
        r1.insert(1, Integer::from(1));
        r1.insert(2, Integer::from(-3));
        let mut r2 = Row::new();
        r2.insert(0, Integer::from(1));
        r2.insert(1, Integer::from(-1));
        r2.insert(2, Integer::from(-1));
        let p = reduce(vec![r1, r2]);
        let x = &p[&0];
        assert_eq!(x.len(), 2);
        assert_eq!(Rational::from((-x[&2].clone(), x[&0].clone())), 2);
        let y = &p[&1];
        assert_eq!(Rational::from((-y[&2].clone(), y[&1].clone())), 1);
    }
}
