//! Exact dense linear algebra over the rationals.
//!
//! Matrices are row-major `Vec<Vec<Rat>>`. All routines use fraction-exact
//! Gaussian elimination; sizes in this crate are tiny (n ≤ 5 for geometry,
//! a few dozen rows for LPs), so no attempt is made at fraction-free tricks.

use crate::rational::{dot, Rat, Vector};
use num_traits::{One, Zero};

/// Row-major rational matrix.
pub type Mat = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

pub fn zero_mat(r: usize, c: usize) -> Mat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn transpose(m: &Mat) -> Mat {
    if m.is_empty() {
        return Vec::new();
    }
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(cols: &[Vector], nrows: usize) -> Mat {
    (0..nrows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

/// Columns of a matrix.
pub fn columns(m: &Mat) -> Vec<Vector> {
    transpose(m)
}

pub fn mat_vec(m: &Mat, v: &[Rat]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let bt = transpose(b);
    a.iter().map(|row| bt.iter().map(|col| dot(row, col)).collect()).collect()
}

/// Reduced row echelon form. Returns the reduced matrix and pivot columns.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    if rows == 0 {
        return (a, Vec::new());
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Rat::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Mat) -> usize {
    rref(m).1.len()
}

/// Rank of a list of vectors.
pub fn rank_of(vs: &[Vector]) -> usize {
    if vs.is_empty() {
        0
    } else {
        rank(&vs.to_vec())
    }
}

/// Basis of the right null space `{x : m x = 0}` with `ncols` unknowns.
pub fn nullspace(m: &Mat, ncols: usize) -> Vec<Vector> {
    if m.is_empty() {
        return (0..ncols).map(|i| crate::rational::unit(ncols, i)).collect();
    }
    let (r, piv) = rref(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (row, &p) in piv.iter().enumerate() {
                x[p] = -r[row][f].clone();
            }
            x
        })
        .collect()
}

/// Plain-dot orthogonal complement of the span of `vs` in dimension `n`:
/// a basis of covectors `c` with `c·v = 0` for all `v`.
pub fn annihilator(vs: &[Vector], n: usize) -> Vec<Vector> {
    nullspace(&vs.to_vec(), n)
}

pub fn det(m: &Mat) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut a = m.clone();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = Rat::one() / &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Solve the square system `m x = b`; `None` if singular.
pub fn solve(m: &Mat, b: &[Rat]) -> Option<Vector> {
    let n = m.len();
    let aug: Mat = m.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    let (r, piv) = rref(&aug);
    if piv.len() != n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some((0..n).map(|i| r[i][n].clone()).collect())
}

/// Any solution of the (possibly non-square) system `m x = b`, or `None`.
pub fn solve_any(m: &Mat, b: &[Rat], ncols: usize) -> Option<Vector> {
    if m.is_empty() {
        return Some(vec![Rat::zero(); ncols]);
    }
    let aug: Mat = m.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    let (r, piv) = rref(&aug);
    if piv.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (row, &p) in piv.iter().enumerate() {
        x[p] = r[row][ncols].clone();
    }
    Some(x)
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    let n = m.len();
    let aug: Mat = m.iter().enumerate().map(|(i, row)| {
        let mut r = row.clone();
        r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
        r
    }).collect();
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Coordinates of `v` in the (independent) basis `basis`, if `v` lies in its span.
pub fn coordinates(basis: &[Vector], v: &[Rat]) -> Option<Vector> {
    let n = v.len();
    let m = from_columns(basis, n);
    solve_any(&m, v, basis.len())
}

/// A maximal linearly independent subset of `vs`, as indices.
pub fn independent_subset(vs: &[Vector]) -> Vec<usize> {
    if vs.is_empty() {
        return Vec::new();
    }
    let n = vs[0].len();
    let m = from_columns(vs, n);
    rref(&m).1
}

/// Symmetric matrix test.
pub fn is_symmetric(m: &Mat) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].len() == n && (0..n).all(|j| m[i][j] == m[j][i]))
}

/// Positive definiteness by leading principal minors (Sylvester's criterion).
pub fn is_positive_definite(m: &Mat) -> bool {
    let n = m.len();
    if !is_symmetric(m) {
        return false;
    }
    (1..=n).all(|k| {
        let sub: Mat = (0..k).map(|i| m[i][..k].to_vec()).collect();
        det(&sub) > Rat::zero()
    })
}

/// Canonical key of a row space: RREF with zero rows removed, rendered as text.
pub fn row_space_key(m: &Mat) -> String {
    let (r, piv) = rref(m);
    let mut s = String::new();
    for row in r.iter().take(piv.len()) {
        for x in row {
            s.push_str(&x.to_string());
            s.push(',');
        }
        s.push(';');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio, vec_i};

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| vec_i(r)).collect()
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(det(&a), rat(1));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn nullspace_dimension() {
        let a = m(&[&[1, 1, 1]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(dot(&a[0], &v), rat(0));
        }
    }

    #[test]
    fn solve_systems() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let x = solve(&a, &vec_i(&[5, 6])).unwrap();
        assert_eq!(x, vec![rat(-4), ratio(9, 2)]);
        assert!(solve_any(&m(&[&[1, 1], &[1, 1]]), &vec_i(&[1, 2]), 2).is_none());
    }

    #[test]
    fn sylvester() {
        assert!(is_positive_definite(&m(&[&[2, 1], &[1, 2]])));
        assert!(!is_positive_definite(&m(&[&[1, 2], &[2, 1]])));
    }
}
