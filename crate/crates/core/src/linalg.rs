//! Exact linear algebra over ℚ by fraction-free integer row reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::gca::Rational;

/// Scales a rational row to a primitive integer row with the same span.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in row {
        if !c.is_zero() {
            l = l.lcm(c.denom());
        }
    }
    let mut out: Vec<BigInt> = row
        .iter()
        .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
        .collect();
    normalize(&mut out);
    out
}

fn normalize(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in row.iter() {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                return;
            }
        }
    }
    if g > BigInt::one() {
        for c in row.iter_mut() {
            *c /= &g;
        }
    }
}

/// Reduced row echelon form over ℤ: every pivot column is zero outside its
/// pivot row. Pivots are chosen as the first nonzero entry scanning rows top
/// down, so the result is deterministic. Returns the nonzero rows and their
/// pivot columns.
pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| integer_row(r))
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        if m[r][col].is_negative() {
            for c in m[r].iter_mut() {
                *c = -&*c;
            }
        }
        let pivot_row = m[r].clone();
        let pv = pivot_row[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let a = row[col].clone();
            let g = a.gcd(&pv);
            let (fa, fp) = (&pv / &g, &a / &g);
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &fa - y * &fp;
            }
            normalize(row);
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{v : A v = 0}` where `rows` are the rows of `A`. One vector per
/// free column, in increasing column order, with a 1 in that column.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (m, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            if !row[f].is_zero() {
                v[p] = -Rational::new(row[f].clone(), row[p].clone());
            }
        }
        out.push(v);
    }
    out
}

/// `A · v` for a matrix given by rows.
pub fn mat_vec(rows: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

/// Transposes a dense matrix with `ncols` columns.
pub fn transpose(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    (0..ncols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::{frac, q};

    #[test]
    fn rank_and_kernel() {
        let a = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![frac(1, 2), q(0), q(1)],
        ];
        assert_eq!(rank(&a, 3), 2);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(rank(&[], 4), 0);
        assert_eq!(kernel(&[], 2).len(), 2);
        assert_eq!(kernel(&[vec![q(0), q(0)]], 2).len(), 2);
    }
}
