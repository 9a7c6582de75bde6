//! Integer lattices: saturated sublattices, Hermite column reduction,
//! coset representatives.

use crate::linalg::annihilator;
use crate::rational::{Rat, Vector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

type IMat = Vec<Vec<BigInt>>;

fn to_int_rows(rows: &[Vector]) -> IMat {
    rows.iter()
        .map(|r| {
            let p = crate::rational::primitive(r);
            p.iter().map(|x| x.to_integer()).collect()
        })
        .collect()
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Column-reduce an integer `k × n` matrix: returns `(H, U, rank)` with
/// `H = C·U`, `U` unimodular and `H` lower echelon (first `rank` columns nonzero).
fn column_reduce(c: &IMat, n: usize) -> (IMat, IMat, usize) {
    let mut h = c.clone();
    let mut u: IMat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut col = 0;
    for r in 0..h.len() {
        if col == n {
            break;
        }
        for j in col + 1..n {
            if h[r][j].is_zero() {
                continue;
            }
            let a = h[r][col].clone();
            let b = h[r][j].clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            let apply = |m: &mut IMat| {
                for row in m.iter_mut() {
                    let x = row[col].clone();
                    let y = row[j].clone();
                    row[col] = &s * &x + &t * &y;
                    row[j] = -&bg * &x + &ag * &y;
                }
            };
            apply(&mut h);
            apply(&mut u);
        }
        if !h[r][col].is_zero() {
            if h[r][col].is_negative() {
                for m in [&mut h, &mut u] {
                    for row in m.iter_mut() {
                        row[col] = -row[col].clone();
                    }
                }
            }
            col += 1;
        }
    }
    (h, u, col)
}

fn int_col(u: &IMat, j: usize) -> Vector {
    u.iter().map(|row| Rat::from_integer(row[j].clone())).collect()
}

/// Basis of the integer kernel `{x ∈ ℤⁿ : C x = 0}` of rational covectors `rows`.
pub fn integer_kernel(rows: &[Vector], n: usize) -> Vec<Vector> {
    let nonzero: Vec<Vector> = rows.iter().filter(|r| !crate::rational::is_zero_vec(r)).cloned().collect();
    if nonzero.is_empty() {
        return (0..n).map(|i| crate::rational::unit(n, i)).collect();
    }
    let c = to_int_rows(&nonzero);
    let (_, u, rank) = column_reduce(&c, n);
    (rank..n).map(|j| int_col(&u, j)).collect()
}

/// Basis of the saturated lattice `Span(vs) ∩ ℤⁿ`.
pub fn saturated_basis(vs: &[Vector], n: usize) -> Vec<Vector> {
    if vs.is_empty() {
        return Vec::new();
    }
    integer_kernel(&annihilator(vs, n), n)
}

/// Lower-triangular Hermite basis (as columns) of the full-rank lattice
/// generated by the columns of `basis`, with positive diagonal.
pub fn hermite_basis(basis: &[Vector], n: usize) -> Vec<Vector> {
    let rows: IMat = (0..n)
        .map(|i| basis.iter().map(|b| {
            assert!(b[i].is_integer(), "lattice basis must be integral");
            b[i].to_integer()
        }).collect())
        .collect();
    let k = basis.len();
    let (h, _, rank) = column_reduce(&rows, k);
    (0..rank).map(|j| int_col(&h, j)).collect()
}

/// Index `[ℤⁿ : L]` and a complete set of coset representatives of `ℤⁿ / L`
/// for a full-rank integral lattice `L` (given by any basis). Fails if there
/// are more than `max` representatives.
pub fn coset_representatives(basis: &[Vector], n: usize, max: usize) -> Result<Vec<Vector>, usize> {
    let h = hermite_basis(basis, n);
    assert_eq!(h.len(), n, "lattice must have full rank");
    let diag: Vec<usize> = (0..n)
        .map(|i| h[i][i].to_integer().to_usize().expect("diagonal fits in usize"))
        .collect();
    let total: usize = diag.iter().product();
    if total > max {
        return Err(total);
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    loop {
        out.push(idx.iter().map(|&v| Rat::from_integer(BigInt::from(v))).collect());
        let mut d = 0;
        loop {
            if d == n {
                return Ok(out);
            }
            idx[d] += 1;
            if idx[d] < diag[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Reduce an integer point modulo a full-rank lattice given by its Hermite basis,
/// landing in the canonical box of coset representatives.
pub fn reduce_mod(h: &[Vector], x: &[Rat]) -> Vector {
    let mut v = x.to_vec();
    for i in 0..h.len() {
        let q = (&v[i] / &h[i][i]).floor();
        if !q.is_zero() {
            v = crate::rational::axpy(&v, &(-q), &h[i]);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{dot, vec_i};

    #[test]
    fn kernel_of_diagonal_form() {
        let k = integer_kernel(&[vec_i(&[1, 1])], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(dot(&k[0], &vec_i(&[1, 1])), Rat::zero());
        assert!(k[0].iter().all(|x| x.abs() == Rat::one()));
    }

    #[test]
    fn saturation_of_non_primitive_span() {
        let b = saturated_basis(&[vec_i(&[2, 4, 0]), vec_i(&[0, 0, 3])], 3);
        assert_eq!(b.len(), 2);
        // (1,2,0) must be in the lattice spanned by b.
        let h = hermite_basis(&b.iter().cloned().chain([vec_i(&[1, 0, 0])]).collect::<Vec<_>>(), 3);
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn index_two_cosets() {
        let reps = coset_representatives(&[vec_i(&[1, 1]), vec_i(&[1, -1])], 2, 100).unwrap();
        assert_eq!(reps.len(), 2);
    }
}
