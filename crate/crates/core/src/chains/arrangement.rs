//! Hyperplane arrangements: enumeration of every face (of every dimension)
//! with a rational relative-interior witness, used for exact equality of
//! piecewise-constant functions.

use crate::error::{Error, Result};
use crate::geometry::region::{Constraint, HalfSpaceRegion};
use crate::linalg::{from_columns, inverse, mat_mul, nullspace, row_space_key, solve_any, transpose, Mat};
use crate::rational::{dot, is_zero_vec, primitive_pair, Rat, Vector};
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;

/// Default cap on the number of distinct hyperplanes in exact mode.
pub const DEFAULT_MAX_ARRANGEMENT: usize = 40;

/// Exact-mode cap, overridable by the `POLYTRUNC_MAX_ARRANGEMENT` variable.
pub fn max_arrangement() -> usize {
    std::env::var("POLYTRUNC_MAX_ARRANGEMENT")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ARRANGEMENT)
}

/// An affine hyperplane `normal · x = offset` with primitive normal whose
/// first nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub normal: Vector,
    pub offset: Rat,
}

impl Hyperplane {
    pub fn new(normal: &[Rat], offset: &Rat) -> Option<Hyperplane> {
        if is_zero_vec(normal) {
            return None;
        }
        let (mut n, mut o) = primitive_pair(normal, offset);
        if n.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            n = crate::rational::neg(&n);
            o = -o;
        }
        Some(Hyperplane { normal: n, offset: o })
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.offset
    }
}

/// Deduplicated canonical hyperplanes.
pub fn canonical(hps: impl IntoIterator<Item = (Vector, Rat)>) -> Vec<Hyperplane> {
    let mut set: Vec<Hyperplane> = hps.into_iter().filter_map(|(n, o)| Hyperplane::new(&n, &o)).collect();
    set.sort();
    set.dedup();
    set
}

/// A face of an arrangement: a relatively open polyhedron on which every
/// hyperplane has constant sign.
#[derive(Clone, Debug)]
pub struct Face {
    pub dim: usize,
    pub witness: Vector,
    pub region: HalfSpaceRegion,
}

/// Open top-dimensional cells of an arrangement in `ℝ^k`: (region, witness).
pub fn top_cells(k: usize, hps: &[Hyperplane]) -> Vec<(HalfSpaceRegion, Vector)> {
    if k == 0 {
        return vec![(HalfSpaceRegion::whole(0), Vec::new())];
    }
    if k == 1 {
        return line_cells(hps);
    }
    let mut cells: Vec<(HalfSpaceRegion, Vector)> = vec![(HalfSpaceRegion::whole(k), vec![Rat::zero(); k])];
    for h in hps {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for (reg, w) in cells {
            let s = h.eval(&w);
            let pos = reg.clone().gt(h.normal.clone(), h.offset.clone());
            let neg = reg.clone().lt(h.normal.clone(), h.offset.clone());
            if s.is_positive() {
                next.push((pos, w));
                if let Some(w2) = neg.witness() {
                    next.push((neg, w2));
                }
            } else if s.is_negative() {
                next.push((neg, w));
                if let Some(w2) = pos.witness() {
                    next.push((pos, w2));
                }
            } else {
                if let Some(w2) = pos.witness() {
                    next.push((pos, w2));
                }
                if let Some(w2) = neg.witness() {
                    next.push((neg, w2));
                }
            }
        }
        cells = next;
    }
    cells
}

fn line_cells(hps: &[Hyperplane]) -> Vec<(HalfSpaceRegion, Vector)> {
    let mut pts: Vec<Rat> = hps.iter().map(|h| &h.offset / &h.normal[0]).collect();
    pts.sort();
    pts.dedup();
    let one = Rat::one();
    let e = vec![one.clone()];
    if pts.is_empty() {
        return vec![(HalfSpaceRegion::whole(1), vec![Rat::zero()])];
    }
    let mut out = Vec::new();
    out.push((HalfSpaceRegion::whole(1).lt(e.clone(), pts[0].clone()), vec![&pts[0] - &one]));
    for w in pts.windows(2) {
        let mid = (&w[0] + &w[1]) / Rat::from_integer(2.into());
        out.push((HalfSpaceRegion::whole(1).gt(e.clone(), w[0].clone()).lt(e.clone(), w[1].clone()), vec![mid]));
    }
    let last = pts.last().unwrap().clone();
    out.push((HalfSpaceRegion::whole(1).gt(e, last.clone()), vec![last + one]));
    out
}

struct Flat {
    x0: Vector,
    basis: Vec<Vector>,
    eqs: Vec<Hyperplane>,
}

/// Every face of the arrangement of `hps` in `ℝⁿ`, each with a relative-interior
/// witness. Fails if there are more hyperplanes than the exact-mode cap.
pub fn all_faces(n: usize, hps: &[Hyperplane]) -> Result<Vec<Face>> {
    let cap = max_arrangement();
    if hps.len() > cap {
        return Err(Error::ArrangementTooLarge(hps.len(), cap));
    }
    let mut faces = Vec::new();
    let mut level: Vec<Flat> = vec![Flat { x0: vec![Rat::zero(); n], basis: (0..n).map(|i| crate::rational::unit(n, i)).collect(), eqs: Vec::new() }];
    while !level.is_empty() {
        let mut seen: HashSet<String> = HashSet::new();
        let mut next: Vec<Flat> = Vec::new();
        for flat in &level {
            let k = flat.basis.len();
            // Restrict the remaining hyperplanes to the flat.
            let mut restricted: Vec<Hyperplane> = Vec::new();
            for h in hps {
                let g: Vector = flat.basis.iter().map(|b| dot(&h.normal, b)).collect();
                let c = &h.offset - dot(&h.normal, &flat.x0);
                if is_zero_vec(&g) {
                    continue;
                }
                let r = Hyperplane::new(&g, &c).unwrap();
                if !restricted.contains(&r) {
                    restricted.push(r);
                }
                // Child flat.
                let mut eqs = flat.eqs.clone();
                eqs.push(h.clone());
                let aug: Mat = eqs.iter().map(|e| {
                    let mut row = e.normal.clone();
                    row.push(e.offset.clone());
                    row
                }).collect();
                let key = row_space_key(&aug);
                if !seen.insert(key) {
                    continue;
                }
                let gm: Mat = vec![g.clone()];
                let t0 = solve_any(&gm, &[c.clone()], k).expect("nonzero row");
                let ns = nullspace(&gm, k);
                let x0 = add_comb(&flat.x0, &flat.basis, &t0);
                let basis: Vec<Vector> = ns.iter().map(|v| comb(&flat.basis, v, n)).collect();
                next.push(Flat { x0, basis, eqs });
            }
            restricted.sort();
            for (cell, t) in top_cells(k, &restricted) {
                let witness = add_comb(&flat.x0, &flat.basis, &t);
                let region = lift_region(&cell, flat, n);
                faces.push(Face { dim: k, witness, region });
            }
        }
        level = next;
    }
    Ok(faces)
}

fn comb(basis: &[Vector], t: &[Rat], n: usize) -> Vector {
    let mut x = vec![Rat::zero(); n];
    for (ti, b) in t.iter().zip(basis) {
        if !ti.is_zero() {
            x = crate::rational::axpy(&x, ti, b);
        }
    }
    x
}

fn add_comb(x0: &[Rat], basis: &[Vector], t: &[Rat]) -> Vector {
    crate::rational::add(x0, &comb(basis, t, x0.len()))
}

/// Express a cell given in flat coordinates as a region of `ℝⁿ`.
fn lift_region(cell: &HalfSpaceRegion, flat: &Flat, n: usize) -> HalfSpaceRegion {
    let mut r = HalfSpaceRegion::whole(n);
    for e in &flat.eqs {
        r = r.eq(e.normal.clone(), e.offset.clone());
    }
    let k = flat.basis.len();
    if k == 0 || cell.constraints.is_empty() {
        return r;
    }
    // Left inverse L = (NᵀN)⁻¹Nᵀ of the basis matrix N.
    let nm = from_columns(&flat.basis, n);
    let nt = transpose(&nm);
    let left = mat_mul(&inverse(&mat_mul(&nt, &nm)).expect("basis"), &nt);
    for c in &cell.constraints {
        let cov: Vector = (0..n).map(|j| (0..k).map(|i| &c.normal[i] * &left[i][j]).sum()).collect();
        let off = &c.offset + dot(&cov, &flat.x0);
        r.push(Constraint::new(cov, off, c.strict));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, vec_i};

    #[test]
    fn two_lines_have_nine_faces() {
        let hps = canonical(vec![(vec_i(&[1, 0]), rat(0)), (vec_i(&[0, 1]), rat(0))]);
        let faces = all_faces(2, &hps).unwrap();
        assert_eq!(faces.len(), 9);
        for f in &faces {
            assert!(f.region.contains(&f.witness));
        }
    }

    #[test]
    fn three_generic_lines() {
        let hps = canonical(vec![(vec_i(&[1, 0]), rat(0)), (vec_i(&[0, 1]), rat(0)), (vec_i(&[1, 1]), rat(1))]);
        let faces = all_faces(2, &hps).unwrap();
        // 7 regions, 9 edges, 3 vertices.
        assert_eq!(faces.iter().filter(|f| f.dim == 2).count(), 7);
        assert_eq!(faces.iter().filter(|f| f.dim == 1).count(), 9);
        assert_eq!(faces.iter().filter(|f| f.dim == 0).count(), 3);
    }

    #[test]
    fn cap_is_enforced() {
        let hps: Vec<Hyperplane> = (0..50).map(|i| Hyperplane::new(&vec_i(&[1]), &rat(i)).unwrap()).collect();
        assert!(matches!(all_faces(1, &hps), Err(Error::ArrangementTooLarge(50, _))) || max_arrangement() >= 50);
    }
}
