//! Integer linear algebra on graph Laplacians.
//!
//! Everything here is exact over [`BigInt`]. Three independent routes are
//! provided: a fraction-free determinant of the reduced Laplacian, the Smith
//! invariant factors of the full Laplacian, and a Hermite-form coset key for
//! multidegree classes.

use crate::error::{Error, Result};
use crate::graph::MarkedDualGraph;
use crate::rational::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

/// Laplacian with loops ignored.
pub fn laplacian(graph: &MarkedDualGraph) -> Matrix {
    let n = graph.vertex_count();
    let mut l = vec![vec![BigInt::zero(); n]; n];
    for &(a, b) in graph.edges() {
        if a != b {
            l[a][a] += 1;
            l[b][b] += 1;
            l[a][b] -= 1;
            l[b][a] -= 1;
        }
    }
    l
}

fn reduced(graph: &MarkedDualGraph) -> Matrix {
    let l = laplacian(graph);
    let m = l.len() - 1;
    l.into_iter().take(m).map(|row| row.into_iter().take(m).collect()).collect()
}

/// Determinant by Bareiss fraction-free elimination.
pub fn determinant(mut a: Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Number of spanning trees (matrix-tree theorem).
pub fn complexity(graph: &MarkedDualGraph) -> BigInt {
    determinant(reduced(graph))
}

/// Diagonal of the Smith normal form, nonnegative, in divisibility order.
/// Zero factors come last.
pub fn invariant_factors(mut a: Matrix) -> Vec<BigInt> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // pivot: smallest nonzero entry in the remaining block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let f = a[i][t].div_floor(&a[t][t]);
                    let (src, dst) = two_rows(&mut a, t, i);
                    for (x, y) in dst[t..].iter_mut().zip(&src[t..]) {
                        *x -= y * &f;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let f = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let v = &row[t] * &f;
                        row[j] -= v;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // enforce divisibility of the remaining block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    let (src, dst) = two_rows(&mut a, i, t);
                    for (x, y) in dst[t..].iter_mut().zip(&src[t..]) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag.resize(rows.min(cols), BigInt::zero());
    diag
}

/// Rows `i` and `j` of `a` borrowed together, for `i != j`.
fn two_rows<T>(a: &mut [Vec<T>], i: usize, j: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    if i < j {
        let (lo, hi) = a.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

/// Spanning-tree count as the product of the nonzero invariant factors of
/// the Laplacian, i.e. the order of the torsion of its cokernel.
pub fn complexity_snf(graph: &MarkedDualGraph) -> BigInt {
    invariant_factors(laplacian(graph)).into_iter().filter(|x| !x.is_zero()).product()
}

/// Row Hermite normal form of the lattice spanned by the rows of `a`:
/// nonzero rows only, positive pivots, entries above each pivot reduced
/// into `[0, pivot)`.
pub fn hermite_rows(mut a: Matrix) -> Matrix {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-combine every row below into row r
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let ext = a[r][c].extended_gcd(&a[i][c]);
            let (g, x, y) = (ext.gcd, ext.x, ext.y);
            let (p, q) = (&a[r][c] / &g, &a[i][c] / &g);
            let (upper, lower) = two_rows(&mut a, r, i);
            for (u, l) in upper[c..].iter_mut().zip(lower[c..].iter_mut()) {
                let top = &x * &*u + &y * &*l;
                let bottom = &p * &*l - &q * &*u;
                *u = top;
                *l = bottom;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for v in a[r].iter_mut() {
                *v = -&*v;
            }
        }
        for i in 0..r {
            let f = a[i][c].div_floor(&a[r][c]);
            if !f.is_zero() {
                let (src, dst) = two_rows(&mut a, r, i);
                for (x, y) in dst[c..].iter_mut().zip(&src[c..]) {
                    *x -= y * &f;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// A canonical representative of `d` modulo the Laplacian lattice; two
/// multidegrees are equivalent exactly when their keys agree.
pub fn class_key(hnf: &Matrix, d: &[i64]) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = d.iter().map(|&x| BigInt::from(x)).collect();
    for row in hnf {
        let c = row.iter().position(|x| !x.is_zero()).expect("hermite rows are nonzero");
        let f = v[c].div_floor(&row[c]);
        if !f.is_zero() {
            for (vj, rj) in v.iter_mut().zip(row) {
                *vj -= rj * &f;
            }
        }
    }
    v
}

/// Whether `d1 - d2` lies in the image of the Laplacian, decided by an
/// exact rational solve against the reduced Laplacian.
pub fn multidegrees_equivalent(graph: &MarkedDualGraph, d1: &[i64], d2: &[i64]) -> Result<bool> {
    let n = graph.vertex_count();
    if d1.len() != n || d2.len() != n {
        return Err(Error::InvalidSheaf(format!("multidegrees must have {n} entries")));
    }
    let (s1, s2) = (d1.iter().sum::<i64>(), d2.iter().sum::<i64>());
    if s1 != s2 {
        return Err(Error::DegreeMismatch { expected: s1, found: s2 });
    }
    if n == 1 {
        return Ok(true);
    }
    let l0 = reduced(graph);
    let m = n - 1;
    let mut aug: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut row: Vec<Q> = l0[i].iter().map(|x| Q::from_integer(x.clone())).collect();
            row.push(Q::from_integer(BigInt::from(d1[i] - d2[i])));
            row
        })
        .collect();
    for c in 0..m {
        let p = (c..m).find(|&i| !aug[i][c].is_zero()).expect("reduced Laplacian of a connected graph is invertible");
        aug.swap(c, p);
        let pivot = aug[c][c].clone();
        for v in aug[c].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..m {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                let (src, dst) = two_rows(&mut aug, c, i);
                for (x, y) in dst[c..].iter_mut().zip(&src[c..]) {
                    *x -= y * &f;
                }
            }
        }
    }
    Ok(aug.iter().all(|row| row[m].is_integer()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> MarkedDualGraph {
        MarkedDualGraph::stable(&[0, 0], &[(0, 1), (0, 1), (0, 1)], &[]).unwrap()
    }

    fn int(m: &[&[i64]]) -> Matrix {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn complexity_examples() {
        let bridge = MarkedDualGraph::stable(&[1, 1], &[(0, 1)], &[]).unwrap();
        assert_eq!(complexity(&bridge), BigInt::from(1));
        assert_eq!(complexity(&theta()), BigInt::from(3));
        let two_loops = MarkedDualGraph::stable(&[0], &[(0, 0), (0, 0)], &[]).unwrap();
        assert_eq!(complexity(&two_loops), BigInt::from(1));
        assert_eq!(complexity_snf(&theta()), BigInt::from(3));
        assert_eq!(laplacian(&two_loops), int(&[&[0]]));
    }

    #[test]
    fn complete_graph_k4() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let k4 = MarkedDualGraph::stable(&[0; 4], &edges, &[]).unwrap();
        assert_eq!(complexity(&k4), BigInt::from(16));
        assert_eq!(invariant_factors(laplacian(&k4)), vec![1, 4, 4, 0].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn determinant_with_pivoting() {
        assert_eq!(determinant(int(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(int(&[&[2, 3, 1], &[4, 1, 0], &[0, 5, 6]])), BigInt::from(-40));
        assert_eq!(determinant(int(&[&[1, 2], &[2, 4]])), BigInt::from(0));
    }

    #[test]
    fn smith_form_small() {
        assert_eq!(invariant_factors(int(&[&[2, 4], &[6, 8]])), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(invariant_factors(int(&[&[6, 0], &[0, 4]])), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn equivalence_examples() {
        let t = theta();
        assert!(multidegrees_equivalent(&t, &[0, 2], &[3, -1]).unwrap());
        assert!(!multidegrees_equivalent(&t, &[0, 2], &[1, 1]).unwrap());
        assert!(multidegrees_equivalent(&t, &[5, -3], &[5, -3]).unwrap());
        assert!(matches!(multidegrees_equivalent(&t, &[0, 2], &[0, 1]), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn class_keys_on_theta() {
        let t = theta();
        let h = hermite_rows(laplacian(&t));
        let keys: std::collections::BTreeSet<_> = (-4..=6).map(|a| class_key(&h, &[a, 2 - a])).collect();
        assert_eq!(keys.len(), 3);
        assert_eq!(class_key(&h, &[0, 2]), class_key(&h, &[3, -1]));
    }
}
