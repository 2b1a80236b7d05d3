//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use qforms_core::algebroids::StructureData;
use qforms_core::gca::{q, Element, GeneratorTable, Monomial, Rational};
use qforms_core::Derivation;
use rand::Rng;

pub type Constants = Vec<Vec<Vec<Rational>>>;

/// Rank by plain Gaussian elimination over ℚ.
pub fn dense_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &pivot[col];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &f * y;
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the null space `{v : Σ_j rows[i][j] v_j = 0}` by elimination.
pub fn dense_kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][col];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// `a · b` for exterior monomials given as sorted index lists.
fn wedge(a: &[usize], b: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Chevalley–Eilenberg cohomology of a Lie algebra from its constants,
/// computed on the full exterior algebra by subsets and dense ranks.
pub fn ce_betti(c: &Constants) -> Vec<usize> {
    let n = c.len();
    let subsets = |k: usize| -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    };
    // d θ^k = −Σ_{i<j} c_ij^k θ^i θ^j
    let dtheta: Vec<Vec<(Rational, Vec<usize>)>> = (0..n)
        .map(|k| {
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if !c[i][j][k].is_zero() {
                        out.push((-c[i][j][k].clone(), vec![i, j]));
                    }
                }
            }
            out
        })
        .collect();
    let matrix = |k: usize| -> Vec<Vec<Rational>> {
        let src = subsets(k);
        let dst = subsets(k + 1);
        src.iter()
            .map(|s| {
                let mut row = vec![Rational::zero(); dst.len()];
                for (pos, &g) in s.iter().enumerate() {
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    for (coef, pair) in &dtheta[g] {
                        let Some((s1, left)) = wedge(&s[..pos], pair) else {
                            continue;
                        };
                        let Some((s2, full)) = wedge(&left, &s[pos + 1..]) else {
                            continue;
                        };
                        let idx = dst.iter().position(|d| *d == full).unwrap();
                        row[idx] += coef * q((sign * s1 * s2) as i64);
                    }
                }
                row
            })
            .collect()
    };
    let ranks: Vec<usize> = (0..=n)
        .map(|k| if k == n { 0 } else { dense_rank(matrix(k)) })
        .collect();
    (0..=n)
        .map(|k| subsets(k).len() - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] })
        .collect()
}

/// Componentwise Jacobi: `Σ_cyc c_ij^m c_mk^l = 0` for all `i, j, k, l`.
pub fn satisfies_jacobi(c: &Constants) -> bool {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += &c[i][j][m] * &c[m][k][l];
                        s += &c[j][k][m] * &c[m][i][l];
                        s += &c[k][i][m] * &c[m][j][l];
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub fn so3_constants() -> Constants {
    let mut c = vec![vec![vec![q(0); 3]; 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[i][j][k] = q(1);
        c[j][i][k] = q(-1);
    }
    c
}

pub fn heisenberg_constants() -> Constants {
    let mut c = vec![vec![vec![q(0); 3]; 3]; 3];
    c[0][1][2] = q(1);
    c[1][0][2] = q(-1);
    c
}

/// The 2-dim solvable algebra `[e1, e2] = e2`.
pub fn solvable2_constants() -> Constants {
    let mut c = vec![vec![vec![q(0); 2]; 2]; 2];
    c[0][1][1] = q(1);
    c[1][0][1] = q(-1);
    c
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = Rational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Constants of the same Lie algebra in the basis `e'_a = P_a^i e_i`.
pub fn change_basis(c: &Constants, p: &[Vec<Rational>]) -> Option<Constants> {
    let n = c.len();
    let pinv = invert(p)?;
    let mut out = vec![vec![vec![q(0); n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for e in 0..n {
                let mut s = q(0);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if !c[i][j][k].is_zero() {
                                s += &p[a][i] * &p[b][j] * &c[i][j][k] * &pinv[k][e];
                            }
                        }
                    }
                }
                out[a][b][e] = s;
            }
        }
    }
    Some(out)
}

/// A random Lie algebra of dimension ≤ 3: a known algebra in a random basis.
pub fn random_lie_algebra<R: Rng>(rng: &mut R) -> Constants {
    let base = match rng.gen_range(0..4) {
        0 => so3_constants(),
        1 => heisenberg_constants(),
        2 => solvable2_constants(),
        _ => vec![vec![vec![q(0); 1]; 1]; 1],
    };
    let n = base.len();
    loop {
        let p: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| q(rng.gen_range(-2..=2))).collect())
            .collect();
        if let Some(c) = change_basis(&base, &p) {
            return c;
        }
    }
}

pub fn structure(c: &Constants) -> StructureData {
    let names: Vec<String> = (1..=c.len()).map(|i| format!("θ{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    StructureData::from_constants(&refs, c).expect("valid constants")
}

/// The plane with the rotation field `−y ∂x + x ∂y`.
pub fn rotation() -> (Arc<GeneratorTable>, Vec<Derivation>) {
    let m = GeneratorTable::new([("x", 0), ("y", 0)]).unwrap();
    let x = Element::generator(&m, 0);
    let y = Element::generator(&m, 1);
    let rho = Derivation::from_images(&m, 0, BTreeMap::from([(0, -&y), (1, x)])).unwrap();
    (m, vec![rho])
}

/// Matrix of `d` from the span of `src` into the span of `dst`, one row per
/// source monomial.
pub fn matrix_of(d: &Derivation, src: &[Monomial], dst: &[Monomial]) -> Vec<Vec<Rational>> {
    let t = d.table();
    src.iter()
        .map(|m| {
            let img = d.apply(&Element::monomial(t, m.clone(), q(1))).unwrap();
            dst.iter().map(|n| img.coefficient(n)).collect()
        })
        .collect()
}

/// `v · M` for a row vector and a matrix given by rows.
pub fn row_times(v: &[Rational], m: &[Vec<Rational>], ncols: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); ncols];
    for (a, row) in v.iter().zip(m) {
        if a.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += a * x;
        }
    }
    out
}

/// Normalized cohomology of a finite group from its multiplication table
/// (identity at index 0), by direct enumeration of tuples of non-identity
/// elements.
pub fn group_cohomology(table: &[Vec<usize>], max: usize) -> Vec<usize> {
    let g = table.len();
    let tuples = |n: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| (1..g).map(move |a| [t.clone(), vec![a]].concat()))
                .collect();
        }
        out
    };
    let delta = |n: usize| -> Vec<Vec<Rational>> {
        let src = tuples(n);
        let dst = tuples(n + 1);
        src.iter()
            .map(|s| {
                dst.iter()
                    .map(|t| {
                        let mut v = q(0);
                        for i in 0..=n + 1 {
                            let face: Vec<usize> = if i == 0 {
                                t[1..].to_vec()
                            } else if i == n + 1 {
                                t[..n].to_vec()
                            } else {
                                let mut f = t[..i - 1].to_vec();
                                f.push(table[t[i - 1]][t[i]]);
                                f.extend_from_slice(&t[i + 1..]);
                                f
                            };
                            if face == *s {
                                v += q(if i % 2 == 0 { 1 } else { -1 });
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect()
    };
    let ranks: Vec<usize> = (0..=max).map(|n| dense_rank(delta(n))).collect();
    (0..=max)
        .map(|n| tuples(n).len() - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] })
        .collect()
}
