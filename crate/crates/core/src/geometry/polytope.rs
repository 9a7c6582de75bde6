//! Support vectors (virtual polytopes) over a fan, and their realization as
//! polytopes with that normal fan.

use super::fan::Fan;
use super::hull::{vertices_and_rays, VPolytope};
use super::region::HalfSpaceRegion;
use super::space::Space;
use crate::error::{Error, Result};
use crate::linalg::{inverse, solve, transpose, Mat};
use crate::rational::{fmt_vec, neg, primitive_pair, Rat, Vector};
use num_traits::{Signed, Zero};
use std::sync::Arc;

/// Which tangent cone to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `T⁺_σ = {⟨x,u_ρ⟩ ≤ −a_ρ, ρ ∈ σ}` (closed).
    Inward,
    /// `T⁻_σ = {⟨x,u_ρ⟩ > −a_ρ, ρ ∈ σ}` (open).
    Outward,
}

/// An assignment of a support number `a_ρ` to every ray of a fan.
/// Any such vector is a virtual polytope; it is a polytope when
/// [`realize_polytope`] succeeds.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVector {
    pub fan: Arc<Fan>,
    pub a: Vec<Rat>,
}

impl SupportVector {
    pub fn new(fan: Arc<Fan>, a: Vec<Rat>) -> Result<Self> {
        if a.len() != fan.num_rays() {
            return Err(Error::DimensionMismatch { expected: fan.num_rays(), got: a.len() });
        }
        Ok(SupportVector { fan, a })
    }

    /// The zero support vector (the point `{0}`, a degenerate polytope).
    pub fn zero(fan: Arc<Fan>) -> Self {
        let k = fan.num_rays();
        SupportVector { fan, a: vec![Rat::zero(); k] }
    }

    /// Right-hand side `h_ρ = −a_ρ` of `⟨x, u_ρ⟩ ≤ h_ρ`.
    pub fn h(&self, ray: usize) -> Rat {
        -self.a[ray].clone()
    }

    pub fn space(&self) -> &Space {
        &self.fan.space
    }

    /// Component-wise sum (Minkowski sum of the virtual polytopes).
    pub fn add(&self, other: &SupportVector) -> Result<SupportVector> {
        if !Arc::ptr_eq(&self.fan, &other.fan) && *self.fan != *other.fan {
            return Err(Error::FanMismatch);
        }
        Ok(SupportVector { fan: self.fan.clone(), a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect() })
    }

    pub fn scale(&self, t: &Rat) -> SupportVector {
        SupportVector { fan: self.fan.clone(), a: self.a.iter().map(|x| x * t).collect() }
    }

    pub fn sub(&self, other: &SupportVector) -> Result<SupportVector> {
        self.add(&other.scale(&(-Rat::from_integer(1.into()))))
    }

    /// The point `v` of `Span(σ)` with `⟨v, u_ρ⟩ = h_ρ` for `ρ ∈ σ`.
    /// For maximal σ this is the (possibly virtual) vertex `v_σ`.
    pub fn apex_in_span(&self, sigma: usize) -> Vector {
        let c = &self.fan.cones[sigma];
        let sp = self.space();
        let ws: Vec<Vector> = c.rays.iter().map(|&r| self.fan.rays[r].clone()).collect();
        if ws.is_empty() {
            return vec![Rat::zero(); sp.dim];
        }
        let g = sp.gram_of(&ws);
        let hs: Vector = c.rays.iter().map(|&r| self.h(r)).collect();
        let coef = solve(&g, &hs).expect("simplicial cone");
        let mut v = vec![Rat::zero(); sp.dim];
        for (ci, w) in coef.iter().zip(&ws) {
            v = crate::rational::axpy(&v, ci, w);
        }
        v
    }

    /// Vertex `v_σ` for a maximal cone (no feasibility check).
    pub fn virtual_vertex(&self, sigma: usize) -> Result<Vector> {
        if self.fan.cone_dim(sigma) != self.fan.dim() {
            return Err(Error::SingularSystem(format!("cone {sigma} is not full-dimensional")));
        }
        Ok(self.apex_in_span(sigma))
    }

    /// Edge directions at the vertex of maximal cone σ: `e_i` with
    /// `⟨e_i, u_j⟩ = −δ_ij`, index-aligned with the rays of σ.
    pub fn edge_vectors(&self, sigma: usize) -> Vec<Vector> {
        let c = &self.fan.cones[sigma];
        let sp = self.space();
        let rows: Mat = c.rays.iter().map(|&r| sp.covector(&self.fan.rays[r])).collect();
        let inv = inverse(&rows).expect("simplicial full-dimensional cone");
        transpose(&inv).into_iter().map(|col| neg(&col)).collect()
    }

    /// Tangent cone at σ in the given direction; `σ = {0}` gives all of V.
    pub fn tangent_cone(&self, sigma: usize, dir: Direction) -> Result<HalfSpaceRegion> {
        let c = self.fan.cone(sigma)?;
        let sp = self.space();
        let mut r = HalfSpaceRegion::whole(sp.dim);
        for &rho in &c.rays {
            let cov = sp.covector(&self.fan.rays[rho]);
            r = match dir {
                Direction::Inward => r.le(cov, self.h(rho)),
                Direction::Outward => r.gt(cov, self.h(rho)),
            };
        }
        Ok(r)
    }

    /// The closed region `{⟨x,u_ρ⟩ ≤ h_ρ ∀ρ}` (meaningful for honest polytopes).
    pub fn region(&self) -> HalfSpaceRegion {
        let sp = self.space();
        let mut r = HalfSpaceRegion::whole(sp.dim);
        for (rho, u) in self.fan.rays.iter().enumerate() {
            r = r.le(sp.covector(u), self.h(rho));
        }
        r
    }
}

/// A polytope whose normal fan is `support.fan`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    pub support: SupportVector,
    /// Vertex `v_σ` for each maximal cone, in `fan.maximal` order.
    pub vertices: Vec<Vector>,
    /// For each cone σ, indices (into `vertices`) of the vertices of `Q_σ`.
    pub faces: Vec<Vec<usize>>,
}

/// Realize a support vector as a polytope with normal fan `s.fan`.
pub fn realize_polytope(s: &SupportVector) -> Result<Polytope> {
    let fan = &s.fan;
    if !fan.complete {
        return Err(Error::NotComplete("realization needs a complete fan".into()));
    }
    let sp = s.space();
    let mut vertices = Vec::with_capacity(fan.maximal.len());
    for &m in &fan.maximal {
        let v = s.virtual_vertex(m)?;
        for (rho, u) in fan.rays.iter().enumerate() {
            if fan.cones[m].rays.contains(&rho) {
                continue;
            }
            if !(sp.ip(&v, u) < s.h(rho)) {
                return Err(Error::NotInPOfSigma(format!(
                    "vertex {} of cone {m} violates the strict inequality for ray {rho}",
                    fmt_vec(&v)
                )));
            }
        }
        vertices.push(v);
    }
    let faces = (0..fan.cones.len())
        .map(|c| (0..fan.maximal.len()).filter(|&i| fan.is_face(c, fan.maximal[i])).collect())
        .collect();
    Ok(Polytope { support: s.clone(), vertices, faces })
}

impl Polytope {
    pub fn fan(&self) -> &Arc<Fan> {
        &self.support.fan
    }

    pub fn dim(&self) -> usize {
        self.support.fan.dim()
    }

    /// Vertex of maximal cone σ (by cone index).
    pub fn vertex(&self, sigma: usize) -> Option<&Vector> {
        self.support.fan.maximal.iter().position(|&m| m == sigma).map(|i| &self.vertices[i])
    }

    /// Vertices of the face `Q_σ`.
    pub fn face_vertices(&self, sigma: usize) -> Vec<Vector> {
        self.faces[sigma].iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// `dim Q_σ = n − dim σ`.
    pub fn face_dim(&self, sigma: usize) -> usize {
        self.dim() - self.support.fan.cone_dim(sigma)
    }

    pub fn region(&self) -> HalfSpaceRegion {
        self.support.region()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.region().contains(x)
    }

    pub fn tangent_cone(&self, sigma: usize, dir: Direction) -> Result<HalfSpaceRegion> {
        self.support.tangent_cone(sigma, dir)
    }

    pub fn to_vpolytope(&self) -> VPolytope {
        VPolytope::from_points(&self.vertices)
    }

    /// Face `Q_σ` as a V-polytope.
    pub fn face_polytope(&self, sigma: usize) -> VPolytope {
        VPolytope::from_points(&self.face_vertices(sigma))
    }

    pub fn volume(&self) -> Rat {
        crate::geometry::hull::simplex_volume_sum(&self.vertices)
    }

    /// Build a simple polytope `{⟨x,u_i⟩ ≤ h_i}` and its normal fan. Fails if
    /// the polytope is unbounded, not full-dimensional, not simple, or has
    /// redundant inequalities.
    pub fn from_h_representation(space: Space, normals: Vec<Vector>, offsets: Vec<Rat>) -> Result<Polytope> {
        let n = space.dim;
        let mut us = Vec::new();
        let mut hs = Vec::new();
        for (u, h) in normals.iter().zip(&offsets) {
            let (p, hp) = primitive_pair(u, h);
            if us.contains(&p) {
                return Err(Error::NotInPOfSigma("repeated normal".into()));
            }
            us.push(p);
            hs.push(hp);
        }
        let mut reg = HalfSpaceRegion::whole(n);
        for (u, h) in us.iter().zip(&hs) {
            reg = reg.le(space.covector(u), h.clone());
        }
        if !reg.is_full_dimensional() {
            return Err(Error::NotInPOfSigma("not full-dimensional".into()));
        }
        let (verts, rays) = vertices_and_rays(&reg).map_err(|_| Error::NotInPOfSigma("unbounded".into()))?;
        if !rays.is_empty() {
            return Err(Error::NotInPOfSigma("unbounded".into()));
        }
        let mut maximal = Vec::new();
        for v in &verts {
            let tight: Vec<usize> = (0..us.len()).filter(|&i| (space.ip(v, &us[i]) - &hs[i]).is_zero()).collect();
            if tight.len() != n {
                return Err(Error::NotInPOfSigma(format!("vertex {} is not simple", fmt_vec(v))));
            }
            maximal.push(tight);
        }
        for i in 0..us.len() {
            if !maximal.iter().any(|m| m.contains(&i)) {
                return Err(Error::NotInPOfSigma(format!("inequality {i} is redundant")));
            }
            // A facet needs n affinely independent vertices.
            let fv: Vec<&Vector> = verts.iter().zip(&maximal).filter(|(_, m)| m.contains(&i)).map(|(v, _)| v).collect();
            let diffs: Vec<Vector> = fv.iter().map(|v| crate::rational::sub(v, fv[0])).collect();
            if crate::linalg::rank_of(&diffs) + 1 < n {
                return Err(Error::NotInPOfSigma(format!("inequality {i} is redundant")));
            }
        }
        let fan = Arc::new(Fan::new(space, us, maximal)?);
        let a: Vec<Rat> = hs.iter().map(|h| -h.clone()).collect();
        realize_polytope(&SupportVector::new(fan, a)?)
    }
}

/// Sum of support vectors: `a(P₁ + P₂) = a(P₁) + a(P₂)`.
pub fn minkowski_sum_support(s1: &SupportVector, s2: &SupportVector) -> Result<SupportVector> {
    s1.add(s2)
}

/// True when `x` lies in the interior of `T⁺` with all defining slacks nonzero.
pub fn strictly_inside(region: &HalfSpaceRegion, x: &[Rat]) -> bool {
    region.constraints.iter().all(|c| c.slack(x).is_positive())
}

#[cfg(test)]
mod tests {
    use super::super::fan::examples::*;
    use super::*;
    use crate::rational::{rat, vec_i};

    #[test]
    fn segment_from_support_numbers() {
        let fan = Arc::new(line_fan());
        // Ray 0 is +1 (σ₊), ray 1 is −1 (σ₋); Δ = [a,b] has a_{σ₊} = −b, a_{σ₋} = a.
        let s = SupportVector::new(fan.clone(), vec![rat(-3), rat(-1)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        let mut vs: Vec<Vector> = p.vertices.clone();
        vs.sort();
        assert_eq!(vs, vec![vec_i(&[-1]), vec_i(&[3])]);
        assert_eq!(p.volume(), rat(4));
    }

    #[test]
    fn zero_support_is_not_a_polytope() {
        let fan = Arc::new(coordinate_fan(2));
        assert!(matches!(realize_polytope(&SupportVector::zero(fan)), Err(Error::NotInPOfSigma(_))));
    }

    #[test]
    fn rectangle_has_four_vertices() {
        let fan = Arc::new(coordinate_fan(2));
        // Rays +x, −x, +y, −y with T₁ = 2, T₁′ = 1, T₂ = 3, T₂′ = 1: a = −T.
        let s = SupportVector::new(fan, vec![rat(-2), rat(-1), rat(-3), rat(-1)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.volume(), rat(12));
    }

    #[test]
    fn outward_cones() {
        let fan = Arc::new(coordinate_fan(2));
        let s = SupportVector::new(fan.clone(), vec![rat(-1), rat(0), rat(-1), rat(0)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        assert!(p.tangent_cone(0, Direction::Outward).unwrap().constraints.is_empty());
        let corner = fan.cone_index(&[0, 2]).unwrap();
        let t = p.tangent_cone(corner, Direction::Outward).unwrap();
        assert!(t.contains(&[rat(2), rat(2)]));
        assert!(!t.contains(&[rat(1), rat(2)]));
    }

    #[test]
    fn h_representation_builds_normal_fan() {
        let sp = Space::euclidean(2);
        let p = Polytope::from_h_representation(
            sp,
            vec![vec_i(&[1, 0]), vec_i(&[0, 1]), vec_i(&[-1, -1])],
            vec![rat(1), rat(1), rat(0)],
        )
        .unwrap();
        assert_eq!(p.vertices.len(), 3);
        assert!(p.fan().complete);
        assert!(!p.fan().acute);
    }

    #[test]
    fn edges_point_along_facets() {
        let fan = Arc::new(coordinate_fan(2));
        let s = SupportVector::new(fan.clone(), vec![rat(-1), rat(-1), rat(-1), rat(-1)]).unwrap();
        let sigma = fan.cone_index(&[0, 2]).unwrap();
        let e = s.edge_vectors(sigma);
        assert_eq!(e, vec![vec_i(&[-1, 0]), vec_i(&[0, -1])]);
    }
}
