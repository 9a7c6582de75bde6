//! Strongly convex rational polyhedral cones, carried with both ray
//! generators and facet normals.

use super::hull::{cone_facets, span_basis};
use super::region::HalfSpaceRegion;
use super::space::Space;
use crate::error::{Error, Result};
use crate::linalg::{coordinates, nullspace, solve, Mat};
use crate::lp::{Cmp, Lp};
use crate::rational::{axpy, is_zero_vec, primitive, zeros, Rat, Vector};
use num_traits::{One, Signed, Zero};

/// A strongly convex cone `Cone(W)` in `ℝⁿ`.
///
/// `facet_normals` lie in `Span(W)` and satisfy `⟨w, b⟩ ≥ 0` for every ray;
/// inside its span the cone is `{x : ⟨x, b⟩ ≥ 0 ∀ b}`. For simplicial cones
/// the normals are index-aligned with the rays: `⟨w_i, b_j⟩ = 0` for `i ≠ j`
/// and `> 0` for `i = j`. All vectors are primitive integer vectors when the
/// input is rational (unit normalization is replaced by positive rescaling,
/// which no sign pattern depends on).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub ambient: usize,
    pub rays: Vec<Vector>,
    pub facet_normals: Vec<Vector>,
    pub span_dim: usize,
    pub simplicial: bool,
}

/// Result of dualizing a cone.
#[derive(Clone, Debug, PartialEq)]
pub enum DualCone {
    /// Full-dimensional input: the dual is again a strongly convex cone.
    Cone(Cone),
    /// The dual of `{0}`: all of `V`.
    WholeSpace,
    /// Lower-dimensional input: `σ∨ = (relative dual in Span σ) + σ^⊥`.
    WithLineality { cone: Cone, lineality: Vec<Vector> },
}

/// For an independent family `ws`, the vectors `b_j ∈ Span(ws)` with
/// `⟨w_i, b_j⟩ = 0` (i ≠ j) and `> 0` (i = j), made primitive.
pub fn dual_basis(ws: &[Vector], sp: &Space) -> Vec<Vector> {
    let g = sp.gram_of(ws);
    let k = ws.len();
    (0..k)
        .map(|j| {
            let e = crate::rational::unit(k, j);
            let c = solve(&g, &e).expect("independent rays");
            let mut b = zeros(sp.dim);
            for (ci, w) in c.iter().zip(ws) {
                b = axpy(&b, ci, w);
            }
            primitive(&b)
        })
        .collect()
}

impl Cone {
    /// The zero cone `{0}` in `ℝⁿ`.
    pub fn zero(n: usize) -> Cone {
        Cone { ambient: n, rays: Vec::new(), facet_normals: Vec::new(), span_dim: 0, simplicial: true }
    }

    /// Build `Cone(rays)`: rays are made primitive and deduplicated, redundant
    /// generators removed, facet normals computed.
    pub fn new(rays: Vec<Vector>, sp: &Space) -> Result<Cone> {
        let n = sp.dim;
        let mut ws: Vec<Vector> = Vec::new();
        for r in rays {
            sp.check_dim(&r)?;
            if is_zero_vec(&r) {
                return Err(Error::ZeroRay);
            }
            let p = primitive(&r);
            if !ws.contains(&p) {
                ws.push(p);
            }
        }
        if ws.is_empty() {
            return Ok(Cone::zero(n));
        }
        if !strongly_convex(&ws) {
            return Err(Error::NotStronglyConvex);
        }
        let basis = span_basis(&ws);
        let d = basis.len();
        if ws.len() == d {
            let normals = dual_basis(&ws, sp);
            return Ok(Cone { ambient: n, rays: ws, facet_normals: normals, span_dim: d, simplicial: true });
        }
        // Non-simplicial: drop redundant generators, then facets in span coordinates.
        let ws = extreme_generators(&ws);
        let coords: Vec<Vector> = ws.iter().map(|w| coordinates(&basis, w).expect("in span")).collect();
        let g = sp.gram_of(&basis);
        let mut normals = Vec::new();
        for (f, _) in cone_facets(&coords) {
            let s = solve(&g, &f).expect("basis");
            let mut b = zeros(n);
            for (si, e) in s.iter().zip(&basis) {
                b = axpy(&b, si, e);
            }
            normals.push(primitive(&b));
        }
        let simplicial = ws.len() == d;
        if simplicial {
            // Align normals with rays.
            let normals = dual_basis(&ws, sp);
            return Ok(Cone { ambient: n, rays: ws, facet_normals: normals, span_dim: d, simplicial });
        }
        Ok(Cone { ambient: n, rays: ws, facet_normals: normals, span_dim: d, simplicial })
    }

    pub fn dim(&self) -> usize {
        self.span_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span_dim == self.ambient
    }

    /// Plain covectors cutting out `Span(W)` as `c·x = 0`.
    pub fn span_equations(&self) -> Vec<Vector> {
        if self.rays.is_empty() {
            return (0..self.ambient).map(|i| crate::rational::unit(self.ambient, i)).collect();
        }
        crate::linalg::annihilator(&self.rays, self.ambient)
    }

    /// Closed region description: `x ∈ Span(W)` and `⟨x, b⟩ ≥ 0`.
    pub fn region(&self, sp: &Space) -> HalfSpaceRegion {
        let mut r = HalfSpaceRegion::whole(self.ambient);
        for c in self.span_equations() {
            r = r.eq(c, Rat::zero());
        }
        for b in &self.facet_normals {
            r = r.ge(sp.covector(b), Rat::zero());
        }
        r
    }

    /// Relative interior: `x ∈ Span(W)` and `⟨x, b⟩ > 0`.
    pub fn relative_interior(&self, sp: &Space) -> HalfSpaceRegion {
        let mut r = HalfSpaceRegion::whole(self.ambient);
        for c in self.span_equations() {
            r = r.eq(c, Rat::zero());
        }
        for b in &self.facet_normals {
            r = r.gt(sp.covector(b), Rat::zero());
        }
        r
    }

    pub fn contains(&self, sp: &Space, x: &[Rat]) -> bool {
        self.region(sp).contains(x)
    }

    /// Sum of the rays: a relative-interior point.
    pub fn interior_point(&self) -> Vector {
        let mut p = zeros(self.ambient);
        for w in &self.rays {
            p = crate::rational::add(&p, w);
        }
        p
    }

    /// Orthonormal-complement basis `Span(W)^⊥` (w.r.t. the inner product).
    pub fn orthogonal_complement(&self, sp: &Space) -> Vec<Vector> {
        let rows: Mat = self.rays.iter().map(|w| sp.covector(w)).collect();
        if rows.is_empty() {
            return (0..self.ambient).map(|i| crate::rational::unit(self.ambient, i)).collect();
        }
        nullspace(&rows, self.ambient).into_iter().map(|v| primitive(&v)).collect()
    }
}

fn strongly_convex(ws: &[Vector]) -> bool {
    let k = ws.len();
    let n = ws[0].len();
    let mut lp = Lp::new(k);
    for d in 0..n {
        lp.add(ws.iter().map(|w| w[d].clone()).collect(), Cmp::Eq, Rat::zero());
    }
    lp.add(vec![Rat::one(); k], Cmp::Eq, Rat::one());
    for j in 0..k {
        lp.add(crate::rational::unit(k, j), Cmp::Ge, Rat::zero());
    }
    lp.feasible_point().is_none()
}

fn extreme_generators(ws: &[Vector]) -> Vec<Vector> {
    let n = ws[0].len();
    let mut keep: Vec<Vector> = Vec::new();
    for (i, w) in ws.iter().enumerate() {
        let others: Vec<&Vector> = ws.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).collect();
        let k = others.len();
        let mut lp = Lp::new(k);
        for d in 0..n {
            lp.add(others.iter().map(|v| v[d].clone()).collect(), Cmp::Eq, w[d].clone());
        }
        for j in 0..k {
            lp.add(crate::rational::unit(k, j), Cmp::Ge, Rat::zero());
        }
        if lp.feasible_point().is_none() {
            keep.push(w.clone());
        }
    }
    keep
}

/// The dual cone `{y : ⟨y, x⟩ ≥ 0 ∀ x ∈ c}`.
pub fn dual_cone(c: &Cone, sp: &Space) -> Result<DualCone> {
    if c.ambient != sp.dim {
        return Err(Error::DimensionMismatch { expected: sp.dim, got: c.ambient });
    }
    if c.rays.is_empty() {
        return Ok(DualCone::WholeSpace);
    }
    let rel = Cone::new(c.facet_normals.clone(), sp)?;
    if c.is_full_dimensional() {
        Ok(DualCone::Cone(rel))
    } else {
        Ok(DualCone::WithLineality { cone: rel, lineality: c.orthogonal_complement(sp) })
    }
}

/// Acuteness `σ ⊆ σ∨`: all pairwise inner products of rays are `≥ 0`.
pub fn is_acute(c: &Cone, sp: &Space) -> bool {
    acute_violation(c, sp).is_none()
}

/// A pair of ray indices with negative inner product, if any.
pub fn acute_violation(c: &Cone, sp: &Space) -> Option<(usize, usize)> {
    for i in 0..c.rays.len() {
        for j in i + 1..c.rays.len() {
            if sp.ip(&c.rays[i], &c.rays[j]).is_negative() {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, vec_i};

    fn cone(rays: &[&[i64]]) -> Cone {
        let sp = Space::euclidean(rays[0].len());
        Cone::new(rays.iter().map(|r| vec_i(r)).collect(), &sp).unwrap()
    }

    fn same_rays(a: &[Vector], b: &[Vector]) -> bool {
        a.len() == b.len() && a.iter().all(|x| b.contains(x))
    }

    #[test]
    fn orthant_self_dual() {
        let sp = Space::euclidean(2);
        let c = cone(&[&[1, 0], &[0, 1]]);
        let DualCone::Cone(d) = dual_cone(&c, &sp).unwrap() else { panic!() };
        assert!(same_rays(&d.rays, &c.rays));
    }

    #[test]
    fn skew_dual() {
        let sp = Space::euclidean(2);
        let c = cone(&[&[1, 0], &[1, 1]]);
        let DualCone::Cone(d) = dual_cone(&c, &sp).unwrap() else { panic!() };
        assert!(same_rays(&d.rays, &[vec_i(&[0, 1]), vec_i(&[1, -1])]));
    }

    #[test]
    fn dual_of_zero_is_whole_space() {
        let sp = Space::euclidean(2);
        assert_eq!(dual_cone(&Cone::zero(2), &sp).unwrap(), DualCone::WholeSpace);
    }

    #[test]
    fn acuteness_examples() {
        let sp2 = Space::euclidean(2);
        let sp3 = Space::euclidean(3);
        assert!(is_acute(&cone(&[&[1, 0], &[0, 1]]), &sp2));
        assert!(!is_acute(&cone(&[&[1, 0], &[-1, 2]]), &sp2));
        assert!(is_acute(&cone(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]]), &sp3));
    }

    #[test]
    fn rejects_lines() {
        let sp = Space::euclidean(2);
        assert_eq!(Cone::new(vec![vec_i(&[1, 0]), vec_i(&[-1, 0])], &sp), Err(Error::NotStronglyConvex));
    }

    #[test]
    fn non_simplicial_facets() {
        let sp = Space::euclidean(3);
        let c = cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert!(!c.simplicial);
        assert_eq!(c.facet_normals.len(), 4);
        assert!(c.contains(&sp, &vec_i(&[0, 0, 1])));
        assert!(!c.contains(&sp, &vec_i(&[1, 1, 1])));
    }

    #[test]
    fn simplicial_normal_pattern() {
        let sp = Space::euclidean(3);
        let c = cone(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]]);
        for (i, w) in c.rays.iter().enumerate() {
            for (j, b) in c.facet_normals.iter().enumerate() {
                let s = sp.ip(w, b);
                if i == j {
                    assert!(s > rat(0));
                } else {
                    assert_eq!(s, rat(0));
                }
            }
        }
        assert_eq!(c.facet_normals, vec![vec_i(&[1, 0, -1]), vec_i(&[0, 1, -1]), vec_i(&[0, 0, 1])]);
    }
}
