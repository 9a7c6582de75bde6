//! Simplicial fans: face closure, validation, flags, quotient fans.

use super::cone::{acute_violation, Cone};
use super::hull::vertices_and_rays;
use super::space::Space;
use crate::error::{Error, Result};
use crate::lattice::integer_kernel;
use crate::linalg::{coordinates, rank_of};
use crate::rational::{fmt_vec, primitive, Vector};
use std::collections::HashMap;

/// A cone of a fan, stored by its (sorted) global ray indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FanCone {
    pub rays: Vec<usize>,
    pub cone: Cone,
}

/// A face-closed simplicial fan in a [`Space`].
///
/// Cones are sorted by dimension and then ray indices; index 0 is `{0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fan {
    pub space: Space,
    pub rays: Vec<Vector>,
    pub cones: Vec<FanCone>,
    pub maximal: Vec<usize>,
    pub complete: bool,
    pub simplicial: bool,
    pub acute: bool,
    index: HashMap<Vec<usize>, usize>,
}

/// A quotient fan `Σ/τ` with the data needed to transport functions.
#[derive(Clone, Debug)]
pub struct QuotientFan {
    pub fan: Fan,
    /// Lattice basis `U` of `τ^⊥ ∩ ℤⁿ`; quotient coordinates `y` embed as `x = U y`.
    pub basis: Vec<Vector>,
    /// For each quotient cone, the original cone `σ ⪰ τ` it is the image of.
    pub cone_map: Vec<usize>,
    pub tau: usize,
}

impl Fan {
    /// Build a fan from global rays and maximal cones given by ray indices.
    pub fn new(space: Space, rays: Vec<Vector>, maximal: Vec<Vec<usize>>) -> Result<Fan> {
        let n = space.dim;
        let rays: Vec<Vector> = rays
            .into_iter()
            .map(|r| {
                space.check_dim(&r)?;
                if crate::rational::is_zero_vec(&r) {
                    return Err(Error::ZeroRay);
                }
                Ok(primitive(&r))
            })
            .collect::<Result<_>>()?;
        let mut max_sets: Vec<Vec<usize>> = Vec::new();
        for m in maximal {
            let mut m = m;
            m.sort();
            m.dedup();
            if m.iter().any(|&i| i >= rays.len()) {
                return Err(Error::UnknownCone(*m.iter().max().unwrap()));
            }
            let vs: Vec<Vector> = m.iter().map(|&i| rays[i].clone()).collect();
            if rank_of(&vs) != vs.len() {
                return Err(Error::NotSimplicial);
            }
            if !max_sets.contains(&m) {
                max_sets.push(m);
            }
        }
        // Drop cones that are faces of other listed cones.
        let listed = max_sets.clone();
        max_sets.retain(|m| !listed.iter().any(|o| o != m && m.iter().all(|i| o.contains(i))));
        // Face closure.
        let mut sets: Vec<Vec<usize>> = vec![Vec::new()];
        for m in &max_sets {
            let k = m.len();
            for mask in 1u32..(1u32 << k) {
                let s: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).map(|i| m[i]).collect();
                if !sets.contains(&s) {
                    sets.push(s);
                }
            }
        }
        sets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let mut cones = Vec::with_capacity(sets.len());
        let mut index = HashMap::new();
        for (i, s) in sets.iter().enumerate() {
            let cone = Cone::new(s.iter().map(|&r| rays[r].clone()).collect(), &space)?;
            index.insert(s.clone(), i);
            cones.push(FanCone { rays: s.clone(), cone });
        }
        let maximal: Vec<usize> = max_sets.iter().map(|m| index[m]).collect();
        let mut fan = Fan { space, rays, cones, maximal, complete: false, simplicial: true, acute: true, index };
        fan.validate_intersections()?;
        fan.acute = fan.maximal.iter().all(|&m| acute_violation(&fan.cones[m].cone, &fan.space).is_none());
        fan.complete = fan.check_complete(n);
        Ok(fan)
    }

    /// Build a fan from its maximal cones.
    pub fn from_cones(space: Space, maximal: &[Cone]) -> Result<Fan> {
        let mut rays: Vec<Vector> = Vec::new();
        let mut sets = Vec::new();
        for c in maximal {
            if !c.simplicial {
                return Err(Error::NotSimplicial);
            }
            let mut s = Vec::new();
            for r in &c.rays {
                let idx = match rays.iter().position(|x| x == r) {
                    Some(i) => i,
                    None => {
                        rays.push(r.clone());
                        rays.len() - 1
                    }
                };
                s.push(idx);
            }
            sets.push(s);
        }
        Fan::new(space, rays, sets)
    }

    fn validate_intersections(&self) -> Result<()> {
        let n = self.space.dim;
        for (a_pos, &a) in self.maximal.iter().enumerate() {
            for &b in &self.maximal[a_pos + 1..] {
                let ca = &self.cones[a];
                let cb = &self.cones[b];
                let inter = ca.cone.region(&self.space).intersect(&cb.cone.region(&self.space));
                let (_, rays) = vertices_and_rays(&inter).map_err(|_| Error::IntersectionNotFace(a, b))?;
                if rank_of(&rays) == n && n > 0 {
                    let mut w = crate::rational::zeros(n);
                    for r in &rays {
                        w = crate::rational::add(&w, r);
                    }
                    return Err(Error::OverlappingCones(a, b, fmt_vec(&w)));
                }
                let common: Vec<usize> = ca.rays.iter().copied().filter(|r| cb.rays.contains(r)).collect();
                let tau = &self.cones[self.index[&common]].cone;
                if rays.iter().any(|r| !tau.contains(&self.space, r)) {
                    return Err(Error::IntersectionNotFace(a, b));
                }
            }
        }
        Ok(())
    }

    fn check_complete(&self, n: usize) -> bool {
        if n == 0 {
            return true;
        }
        if self.maximal.is_empty() || self.maximal.iter().any(|&m| self.cones[m].rays.len() != n) {
            return false;
        }
        let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for &m in &self.maximal {
            let rs = &self.cones[m].rays;
            for skip in 0..rs.len() {
                let ridge: Vec<usize> = rs.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                *ridge_count.entry(ridge).or_default() += 1;
            }
        }
        ridge_count.values().all(|&c| c == 2)
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// Index of the cone with the given ray set.
    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        let mut s = rays.to_vec();
        s.sort();
        self.index.get(&s).copied()
    }

    /// Index of the cone spanned by a single ray.
    pub fn ray_cone(&self, ray: usize) -> usize {
        self.index[&vec![ray]]
    }

    pub fn cone_dim(&self, c: usize) -> usize {
        self.cones[c].rays.len()
    }

    pub fn cone(&self, c: usize) -> Result<&FanCone> {
        self.cones.get(c).ok_or(Error::UnknownCone(c))
    }

    /// `τ ⪯ σ`.
    pub fn is_face(&self, tau: usize, sigma: usize) -> bool {
        self.cones[tau].rays.iter().all(|r| self.cones[sigma].rays.contains(r))
    }

    /// All faces `τ ⪯ σ`, in index order.
    pub fn faces_of(&self, sigma: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&t| self.is_face(t, sigma)).collect()
    }

    /// All cones `σ' ⪰ σ`, in index order.
    pub fn cofaces_of(&self, sigma: usize) -> Vec<usize> {
        (0..self.cones.len()).filter(|&t| self.is_face(sigma, t)).collect()
    }

    /// All pairs `(σ₁, σ₂)` with `σ₂ ⪯ σ₁`.
    pub fn face_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s1 in 0..self.cones.len() {
            for s2 in self.faces_of(s1) {
                out.push((s1, s2));
            }
        }
        out
    }

    /// Local position of a global ray within cone `σ`.
    pub fn local(&self, sigma: usize, ray: usize) -> Option<usize> {
        self.cones[sigma].rays.iter().position(|&r| r == ray)
    }

    /// First pair of global rays in a common cone with obtuse angle.
    pub fn acute_violation(&self) -> Option<(usize, usize)> {
        for &m in &self.maximal {
            if let Some((i, j)) = acute_violation(&self.cones[m].cone, &self.space) {
                return Some((self.cones[m].rays[i], self.cones[m].rays[j]));
            }
        }
        None
    }

    /// The quotient fan `Σ/τ` in `τ^⊥`, with quotient coordinates in a
    /// lattice basis of `τ^⊥ ∩ ℤⁿ`.
    pub fn quotient(&self, tau: usize) -> Result<QuotientFan> {
        let tc = self.cone(tau)?;
        let n = self.dim();
        let tau_rays: Vec<Vector> = tc.rays.iter().map(|&r| self.rays[r].clone()).collect();
        if tau_rays.is_empty() {
            let basis = (0..n).map(|i| crate::rational::unit(n, i)).collect();
            return Ok(QuotientFan { fan: self.clone(), basis, cone_map: (0..self.cones.len()).collect(), tau });
        }
        let covs: Vec<Vector> = tau_rays.iter().map(|w| self.space.covector(w)).collect();
        let basis = integer_kernel(&covs, n);
        let qspace = self.space.restrict(&basis);
        let cofaces = self.cofaces_of(tau);
        let mut qrays: Vec<Vector> = Vec::new();
        let mut preimage: Vec<usize> = Vec::new();
        for &s in &cofaces {
            for &r in &self.cones[s].rays {
                if tc.rays.contains(&r) || preimage.contains(&r) {
                    continue;
                }
                let p = self.space.project_perp(&tau_rays, &self.rays[r]);
                let y = coordinates(&basis, &p).expect("projection lies in the complement");
                qrays.push(primitive(&y));
                preimage.push(r);
            }
        }
        let qmax: Vec<Vec<usize>> = self
            .maximal
            .iter()
            .filter(|&&m| self.is_face(tau, m))
            .map(|&m| {
                self.cones[m]
                    .rays
                    .iter()
                    .filter(|r| !tc.rays.contains(r))
                    .map(|r| preimage.iter().position(|p| p == r).unwrap())
                    .collect()
            })
            .collect();
        let fan = Fan::new(qspace, qrays, qmax)?;
        let cone_map = fan
            .cones
            .iter()
            .map(|qc| {
                let mut s: Vec<usize> = tc.rays.clone();
                s.extend(qc.rays.iter().map(|&q| preimage[q]));
                self.cone_index(&s).expect("coface exists")
            })
            .collect();
        Ok(QuotientFan { fan, basis, cone_map, tau })
    }
}

/// Common fans used by examples and tests.
pub mod examples {
    use super::*;
    use crate::rational::vec_i;

    /// The complete fan of all coordinate orthants in `ℝⁿ`.
    /// Rays are `e_1, −e_1, e_2, −e_2, …` (ray `2i` is `+e_i`, `2i+1` is `−e_i`).
    pub fn coordinate_fan(n: usize) -> Fan {
        let mut rays = Vec::new();
        for i in 0..n {
            let mut p = vec![0i64; n];
            p[i] = 1;
            rays.push(vec_i(&p));
            p[i] = -1;
            rays.push(vec_i(&p));
        }
        let mut maximal = Vec::new();
        for mask in 0..(1usize << n) {
            maximal.push((0..n).map(|i| 2 * i + ((mask >> i) & 1)).collect());
        }
        Fan::new(Space::euclidean(n), rays, maximal).expect("coordinate fan")
    }

    /// The 1-D fan `{σ₋, 0, σ₊}`; ray 0 is `+1`, ray 1 is `−1`.
    pub fn line_fan() -> Fan {
        coordinate_fan(1)
    }

    fn cyclic_fan(space: Space, rays: &[&[i64]]) -> Fan {
        let r: Vec<Vector> = rays.iter().map(|v| vec_i(v)).collect();
        let k = r.len();
        let maximal = (0..k).map(|i| vec![i, (i + 1) % k]).collect();
        Fan::new(space, r, maximal).expect("cyclic fan")
    }

    /// The unimodular fan with eight rays at multiples of 45°.
    pub fn octagon_fan() -> Fan {
        cyclic_fan(
            Space::euclidean(2),
            &[&[1, 0], &[1, 1], &[0, 1], &[-1, 1], &[-1, 0], &[-1, -1], &[0, -1], &[1, -1]],
        )
    }

    /// The A₂ Weyl chamber fan: six rays at 60° in the inner product
    /// `[[2,1],[1,2]]` (weight-lattice coordinates). Acute, with right angles absent.
    pub fn a2_fan() -> Fan {
        let sp = Space::with_inner_product(vec![vec_i(&[2, 1]), vec_i(&[1, 2])]).unwrap();
        cyclic_fan(sp, &[&[1, 0], &[0, 1], &[-1, 1], &[-1, 0], &[0, -1], &[1, -1]])
    }

    /// The obtuse fan with rays `(1,0), (0,1), (−1,−1)`.
    pub fn obtuse_fan() -> Fan {
        cyclic_fan(Space::euclidean(2), &[&[1, 0], &[0, 1], &[-1, -1]])
    }

    /// The fan with rays `(1,0), (1,1), (0,1), (−1,0), (0,−1)` — a complete fan
    /// with a ray through `(1,1)`; cones containing that ray have non-saturated
    /// `Span(τ) ⊕ τ^⊥` lattices.
    pub fn diagonal_ray_fan() -> Fan {
        cyclic_fan(Space::euclidean(2), &[&[1, 0], &[1, 1], &[0, 1], &[-1, 0], &[0, -1]])
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::rational::vec_i;

    #[test]
    fn line_fan_flags() {
        let f = line_fan();
        assert!(f.complete && f.simplicial && f.acute);
        assert_eq!(f.cones.len(), 3);
    }

    #[test]
    fn obtuse_fan_flags() {
        let f = obtuse_fan();
        assert!(f.complete && f.simplicial);
        assert!(!f.acute);
    }

    #[test]
    fn orthant_fans_complete() {
        for n in 1..=3 {
            let f = coordinate_fan(n);
            assert!(f.complete && f.acute, "n = {n}");
            assert_eq!(f.cones.len(), 3usize.pow(n as u32));
        }
    }

    #[test]
    fn a2_is_acute_complete() {
        let f = a2_fan();
        assert!(f.complete && f.acute);
        assert!(octagon_fan().acute);
    }

    #[test]
    fn incomplete_and_overlapping() {
        let sp = Space::euclidean(2);
        let f = Fan::new(sp.clone(), vec![vec_i(&[1, 0]), vec_i(&[0, 1])], vec![vec![0, 1]]).unwrap();
        assert!(!f.complete);
        let err = Fan::new(sp, vec![vec_i(&[1, 0]), vec_i(&[0, 1]), vec_i(&[1, 1]), vec_i(&[1, -1])], vec![vec![0, 1], vec![2, 3]]);
        assert!(matches!(err, Err(Error::OverlappingCones(..))));
    }

    #[test]
    fn quotient_of_coordinate_fan() {
        let f = coordinate_fan(2);
        let x = f.ray_cone(0);
        let q = f.quotient(x).unwrap();
        assert_eq!(q.fan.dim(), 1);
        assert!(q.fan.complete);
        assert_eq!(q.fan.rays.len(), 2);
        let zero = f.quotient(0).unwrap();
        assert_eq!(zero.fan.cones.len(), f.cones.len());
        let top = f.quotient(f.maximal[0]).unwrap();
        assert_eq!(top.fan.dim(), 0);
        assert_eq!(top.fan.cones.len(), 1);
        assert!(top.fan.complete);
    }
}
