//! The regions `S^{σ₂}_{σ₁}` and `R^{σ₂}_{σ₁} = Q_{σ₁} + S^{σ₂}_{σ₁}`, and the
//! check that the `R`'s partition each outward tangent cone.

use crate::error::{Error, Result};
use crate::geometry::hull::vertices_and_rays;
use crate::geometry::{Direction, Fan, HalfSpaceRegion, Polytope};
use crate::rational::{dot, fmt_vec, from_f64, is_zero_vec, to_f64, vec_f64, Rat, Vector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a [`Region`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    S,
    R,
}

/// An `S` or `R` region with its defining pair and generators.
#[derive(Clone, Debug)]
pub struct Region {
    pub kind: RegionKind,
    pub sigma1: usize,
    pub sigma2: usize,
    /// Exact constraint system (with strictness).
    pub region: HalfSpaceRegion,
    /// Vertices of the compact part: `Q_{σ₁}` for `R`, the origin for `S`.
    pub face: Vec<Vector>,
    /// Extreme rays of the closure of `S^{σ₂}_{σ₁}`.
    pub cone: Vec<Vector>,
    pub empty: bool,
}

fn check_pair(fan: &Fan, s1: usize, s2: usize) -> Result<()> {
    fan.cone(s1)?;
    fan.cone(s2)?;
    if !fan.is_face(s2, s1) {
        return Err(Error::NotAFacePair);
    }
    Ok(())
}

fn check_acute(fan: &Fan) -> Result<()> {
    match fan.acute_violation() {
        Some((i, j)) => Err(Error::NotAcute(i, j)),
        None => Ok(()),
    }
}

/// Constraints of `S^{σ₂}_{σ₁}` shifted by `apex` (the `Span(σ₁)` part of
/// the face `Q_{σ₁}`): `⟨x−c, b_j⟩ > 0` (j ∈ I₁∖I₂), `⟨x−c, b_j⟩ ≤ 0` (j ∈ I₂),
/// `⟨x−c, w_i⟩ > 0` (i ∈ I₁).
fn s_constraints(fan: &Fan, s1: usize, s2: usize, apex: &[Rat], mut r: HalfSpaceRegion) -> HalfSpaceRegion {
    let sp = &fan.space;
    let c1 = &fan.cones[s1];
    let i2 = &fan.cones[s2].rays;
    for (j, &rho) in c1.rays.iter().enumerate() {
        let b = sp.covector(&c1.cone.facet_normals[j]);
        let off = dot(&b, apex);
        r = if i2.contains(&rho) { r.le(b, off) } else { r.gt(b, off) };
    }
    for &rho in &c1.rays {
        let w = sp.covector(&fan.rays[rho]);
        let off = dot(&w, apex);
        r = r.gt(w, off);
    }
    r
}

fn cone_rays(region: &HalfSpaceRegion) -> (bool, Vec<Vector>) {
    if region.witness().is_none() {
        return (true, Vec::new());
    }
    if region.dim == 0 {
        return (false, Vec::new());
    }
    let (_, rays) = vertices_and_rays(&region.closure()).expect("regions are pointed");
    (false, rays)
}

/// `S^{σ₂}_{σ₁}` without the acuteness precondition.
pub fn s_region_unchecked(fan: &Fan, sigma1: usize, sigma2: usize) -> Result<Region> {
    check_pair(fan, sigma1, sigma2)?;
    let n = fan.dim();
    let mut r = HalfSpaceRegion::whole(n);
    for e in fan.cones[sigma1].cone.span_equations() {
        r = r.eq(e, Rat::from_integer(0.into()));
    }
    let zero = vec![Rat::from_integer(0.into()); n];
    let r = s_constraints(fan, sigma1, sigma2, &zero, r);
    let (empty, cone) = cone_rays(&r);
    Ok(Region { kind: RegionKind::S, sigma1, sigma2, region: r, face: vec![zero], cone, empty })
}

/// `S^{σ₂}_{σ₁} ⊆ Span(σ₁)`: the points whose nearest face of `σ₁` is `σ₂`
/// and which lie strictly on the positive side of every ray of `σ₁`.
pub fn s_region(fan: &Fan, sigma1: usize, sigma2: usize) -> Result<Region> {
    check_acute(fan)?;
    s_region_unchecked(fan, sigma1, sigma2)
}

/// `R^{σ₂}_{σ₁}` without the acuteness precondition.
pub fn r_region_unchecked(p: &Polytope, sigma1: usize, sigma2: usize) -> Result<Region> {
    let fan = p.fan().as_ref();
    let s = s_region_unchecked(fan, sigma1, sigma2)?;
    let sp = &fan.space;
    let sv = &p.support;
    let apex = sv.apex_in_span(sigma1);
    let c1 = &fan.cones[sigma1];
    let ws: Vec<Vector> = c1.rays.iter().map(|&r| fan.rays[r].clone()).collect();
    let mut r = HalfSpaceRegion::whole(fan.dim());
    // Component along σ₁^⊥ lies in the projection of Q_{σ₁}.
    for (rho, u) in fan.rays.iter().enumerate() {
        if c1.rays.contains(&rho) {
            continue;
        }
        let pu = sp.project_perp(&ws, u);
        if is_zero_vec(&pu) {
            continue;
        }
        let cov = sp.covector(&pu);
        let off = sv.h(rho) - sp.ip(&apex, u);
        r = r.le(cov, off);
    }
    let r = s_constraints(fan, sigma1, sigma2, &apex, r);
    let face = p.face_vertices(sigma1);
    let empty = s.empty || r.witness().is_none();
    Ok(Region { kind: RegionKind::R, sigma1, sigma2, region: r, face, cone: s.cone, empty })
}

/// `R^{σ₂}_{σ₁} = Q_{σ₁} + S^{σ₂}_{σ₁}`.
pub fn r_region(p: &Polytope, sigma1: usize, sigma2: usize) -> Result<Region> {
    check_acute(p.fan())?;
    r_region_unchecked(p, sigma1, sigma2)
}

/// Outcome of [`verify_double_partition`].
#[derive(Clone, Debug)]
pub struct PartitionReport {
    pub sigma: usize,
    pub acute: bool,
    pub samples: usize,
    /// Sampled points of `T⁻_{Δ,σ}` not covered exactly once, with the pairs containing them.
    pub violations: Vec<(Vector, Vec<(usize, usize)>)>,
    /// Pairs of regions found to intersect, with a common point.
    pub overlaps: Vec<((usize, usize), (usize, usize), Vector)>,
    pub pairs_checked: usize,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.overlaps.is_empty()
    }

    /// `Err(PartitionViolation)` with the first witness, if any.
    pub fn into_result(self) -> Result<PartitionReport> {
        if let Some((x, hits)) = self.violations.first() {
            return Err(Error::PartitionViolation(format!("{} lies in {} regions {:?}", fmt_vec(x), hits.len(), hits)));
        }
        if let Some((a, b, x)) = self.overlaps.first() {
            return Err(Error::PartitionViolation(format!("regions {a:?} and {b:?} share {}", fmt_vec(x))));
        }
        Ok(self)
    }
}

fn snap(x: &[f64]) -> Vector {
    x.iter().map(|v| from_f64((v * 1009.0).round() / 1009.0)).collect()
}

/// Sample `T⁻_{Δ,σ}` and check that every point lies in exactly one
/// `R^{σ₂}_{σ₁}` with `σ ⪯ σ₁`, `σ₂ ⪯ σ`; also check pairwise disjointness of
/// the regions by exact LP on at most 100 pairs.
pub fn verify_double_partition(p: &Polytope, sigma: usize, samples: usize, seed: u64) -> Result<PartitionReport> {
    let fan = p.fan().as_ref();
    fan.cone(sigma)?;
    let n = fan.dim();
    let mut pairs = Vec::new();
    for s1 in fan.cofaces_of(sigma) {
        for s2 in fan.faces_of(sigma) {
            let r = r_region_unchecked(p, s1, s2)?;
            if !r.empty {
                pairs.push(r);
            }
        }
    }
    let target = p.support.tangent_cone(sigma, Direction::Outward)?;
    let scale = 1.0 + p.vertices.iter().flat_map(|v| v.iter().map(|c| to_f64(c).abs())).fold(0.0, f64::max);
    let qs: Vec<Vec<f64>> = p.face_vertices(sigma).iter().map(|v| vec_f64(v)).collect();
    let ws: Vec<Vec<f64>> = fan.cones[sigma].rays.iter().map(|&r| vec_f64(&fan.rays[r])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut drawn = 0usize;
    let mut attempts = 0usize;
    while drawn < samples && attempts < samples * 1000 {
        attempts += 1;
        let mut x: Vec<f64> = if rng.gen_bool(0.5) || ws.is_empty() {
            (0..n).map(|_| rng.gen_range(-4.0 * scale..4.0 * scale)).collect()
        } else {
            // A point of Q_σ pushed far out along the cone σ, plus noise.
            let q = &qs[rng.gen_range(0..qs.len())];
            let t = rng.gen_range(0.0..40.0 * scale);
            let mut x = q.clone();
            for w in &ws {
                let c: f64 = rng.gen_range(0.0..1.0) * t;
                for (xi, wi) in x.iter_mut().zip(w) {
                    *xi += c * wi;
                }
            }
            for xi in x.iter_mut() {
                *xi += rng.gen_range(-2.0 * scale..2.0 * scale);
            }
            x
        };
        if rng.gen_bool(0.1) {
            // Land on a lattice of small denominator: hits boundaries.
            for xi in x.iter_mut() {
                *xi = xi.round();
            }
        }
        let xr = snap(&x);
        if !target.contains(&xr) {
            continue;
        }
        drawn += 1;
        let hits: Vec<(usize, usize)> = pairs.iter().filter(|r| r.region.contains(&xr)).map(|r| (r.sigma1, r.sigma2)).collect();
        if hits.len() != 1 {
            violations.push((xr, hits));
        }
    }
    let mut all_pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            all_pairs.push((i, j));
        }
    }
    if all_pairs.len() > 100 {
        all_pairs.shuffle(&mut rng);
        all_pairs.truncate(100);
    }
    let mut overlaps = Vec::new();
    for &(i, j) in &all_pairs {
        let inter = pairs[i].region.intersect(&pairs[j].region);
        if let Some(w) = inter.witness() {
            overlaps.push(((pairs[i].sigma1, pairs[i].sigma2), (pairs[j].sigma1, pairs[j].sigma2), w));
        }
    }
    Ok(PartitionReport { sigma, acute: fan.acute, samples: drawn, violations, overlaps, pairs_checked: all_pairs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fan::examples::{a2_fan, coordinate_fan, line_fan, obtuse_fan};
    use crate::geometry::nearest::{nearest_face_partition, Polyhedron};
    use crate::geometry::{realize_polytope, Cone, Space, SupportVector};
    use crate::rational::{rat, ratio, vec_i};
    use std::sync::Arc;

    fn polytope(fan: Fan, a: &[i64]) -> Polytope {
        let s = SupportVector::new(Arc::new(fan), a.iter().map(|&v| rat(v)).collect()).unwrap();
        realize_polytope(&s).unwrap()
    }

    #[test]
    fn quadrant_s_regions() {
        let f = coordinate_fan(2);
        let q = f.cone_index(&[0, 2]).unwrap();
        let s = s_region(&f, q, 0).unwrap();
        assert!(s.region.contains(&vec_i(&[1, 2])));
        assert!(!s.region.contains(&vec_i(&[0, 2])));
        let top = s_region(&f, q, q).unwrap();
        assert!(top.empty);
    }

    #[test]
    fn s_agrees_with_nearest_face_on_a_grid() {
        // Inside Span(σ₁) = V for a full-dimensional acute cone, S^{σ₂}_{σ₁} is
        // the set of points of {⟨x,w_i⟩ > 0} whose nearest face of σ₁ is
        // spanned by the rays of σ₁ outside σ₂.
        let f = a2_fan();
        let sp = f.space.clone();
        let s1 = f.maximal[0];
        let c = &f.cones[s1];
        let cells = nearest_face_partition(Polyhedron::Cone(&c.cone), &sp).unwrap();
        for i in -12..=12 {
            for j in -12..=12 {
                let x = vec![ratio(i, 5), ratio(j, 5)];
                let positive = c.rays.iter().all(|&r| sp.ip(&x, &f.rays[r]) > rat(0));
                if !positive {
                    continue;
                }
                let interior: Vec<_> = cells.iter().filter(|cl| cl.region.constraints.iter().all(|k| k.slack(&x) > rat(0))).collect();
                if interior.len() != 1 {
                    continue;
                }
                // σ₂ is spanned by the rays not in the nearest face.
                let near: Vec<usize> = interior[0].face.iter().map(|&l| c.rays[l]).collect();
                let rest: Vec<usize> = c.rays.iter().copied().filter(|r| !near.contains(r)).collect();
                let s2 = f.cone_index(&rest).unwrap();
                assert!(s_region(&f, s1, s2).unwrap().region.contains(&x), "x = {x:?}");
            }
        }
    }

    #[test]
    fn non_simplicial_s_region() {
        let sp = Space::euclidean(3);
        let rays = vec![vec_i(&[1, 0, 0]), vec_i(&[0, 1, 0]), vec_i(&[1, 1, 1]), vec_i(&[-1, -1, -1])];
        let fan = Fan::new(sp.clone(), rays, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let s1 = fan.cone_index(&[0, 1, 2]).unwrap();
        let s2 = fan.cone_index(&[2]).unwrap();
        let s = s_region_unchecked(&fan, s1, s2).unwrap();
        let expect = Cone::new(vec![vec_i(&[1, 0, 0]), vec_i(&[0, 1, 0]), vec_i(&[1, 0, -1]), vec_i(&[0, 1, -1])], &sp).unwrap();
        assert_eq!(s.cone.len(), 4);
        for r in &s.cone {
            assert!(expect.rays.contains(r), "{r:?}");
        }
        assert!(!expect.simplicial);
    }

    #[test]
    fn one_dimensional_r_regions() {
        let p = polytope(line_fan(), &[-2, -1]);
        let f = p.fan().clone();
        let plus = f.ray_cone(0);
        let r = r_region(&p, plus, 0).unwrap();
        assert!(r.region.contains(&[ratio(5, 2)]));
        assert!(!r.region.contains(&[rat(2)]));
        assert!(r_region(&p, plus, plus).unwrap().empty);
        assert!(verify_double_partition(&p, plus, 200, 1).unwrap().passed());
    }

    #[test]
    fn partitions_on_acute_fans() {
        let p = polytope(coordinate_fan(2), &[-1, -1, -2, 0]);
        for s in 0..p.fan().cones.len() {
            let rep = verify_double_partition(&p, s, 300, 3).unwrap();
            assert!(rep.passed(), "σ = {s}: {:?}", rep.violations.first());
        }
        let p = polytope(a2_fan(), &[-1; 6]);
        for s in 0..p.fan().cones.len() {
            assert!(verify_double_partition(&p, s, 300, 4).unwrap().passed(), "σ = {s}");
        }
    }

    #[test]
    fn obtuse_fan_breaks_the_partition() {
        let p = polytope(obtuse_fan(), &[-1, -1, 0]);
        assert!(matches!(s_region(p.fan(), 0, 0), Err(Error::NotAcute(..))));
        let failed = (0..p.fan().cones.len()).any(|s| !verify_double_partition(&p, s, 1000, 5).unwrap().passed());
        assert!(failed);
    }
}
