//! Nearest-face partitions of polyhedra and cones, plus an independent
//! nearest-point projection oracle.

use super::cone::Cone;
use super::hull::{for_each_subset, hull_of, vertices_and_rays};
use super::region::HalfSpaceRegion;
use super::space::Space;
use crate::error::{Error, Result};
use crate::linalg::{inverse, mat_vec, solve, Mat};
use crate::rational::{axpy, neg, Rat, Vector};
use num_traits::{Signed, Zero};

/// Input polyhedron for [`nearest_face_partition`].
#[derive(Clone, Copy, Debug)]
pub enum Polyhedron<'a> {
    /// A pointed polyhedron given by (closed) inequalities.
    Region(&'a HalfSpaceRegion),
    /// A strongly convex cone.
    Cone(&'a Cone),
}

/// One cell of a nearest-face partition.
#[derive(Clone, Debug)]
pub struct NearestCell {
    /// Constraint indices (or, for cones, ray indices of the face) identifying the face.
    pub face: Vec<usize>,
    /// Closed region of points whose nearest point lies in the relative interior of the face.
    pub region: HalfSpaceRegion,
}

/// The closed regions `V̄_P^Q` of the nearest-face partition. Their closures
/// cover `V`, and their interiors are pairwise disjoint.
pub fn nearest_face_partition(p: Polyhedron<'_>, sp: &Space) -> Result<Vec<NearestCell>> {
    match p {
        Polyhedron::Cone(c) if c.simplicial => Ok(cone_partition(c, sp)),
        Polyhedron::Cone(c) => region_partition(&c.region(sp), sp),
        Polyhedron::Region(r) => region_partition(r, sp),
    }
}

fn cone_partition(c: &Cone, sp: &Space) -> Vec<NearestCell> {
    let d = c.rays.len();
    let lineality = c.orthogonal_complement(sp);
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << d) {
        let mut gens: Vec<Vector> = Vec::new();
        let mut face = Vec::new();
        for j in 0..d {
            if mask & (1 << j) != 0 {
                gens.push(c.rays[j].clone());
                face.push(j);
            } else {
                gens.push(neg(&c.facet_normals[j]));
            }
        }
        for l in &lineality {
            gens.push(l.clone());
            gens.push(neg(l));
        }
        let region = hull_of(&[vec![Rat::zero(); c.ambient]], &gens);
        out.push(NearestCell { face, region });
    }
    out
}

/// Constraints tight on the whole face cut out by making `subset` tight.
fn equality_set(r: &HalfSpaceRegion, subset: &[usize]) -> Option<Vec<usize>> {
    let mut f = r.closure();
    for &i in subset {
        let c = r.constraints[i].clone();
        f = f.le(c.normal.clone(), c.offset.clone());
    }
    f.witness()?;
    let mut eq = Vec::new();
    for (j, c) in r.constraints.iter().enumerate() {
        match f.maximize(&c.normal) {
            Some(Ok((v, _))) if v == c.offset => eq.push(j),
            _ => {}
        }
    }
    Some(eq)
}

fn region_partition(r: &HalfSpaceRegion, sp: &Space) -> Result<Vec<NearestCell>> {
    let r = r.closure();
    if r.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = r.constraints.len();
    let ainv = inverse(&sp.gram).expect("positive definite");
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for k in 0..=m {
        for_each_subset(m, k, |sub| {
            if let Some(eq) = equality_set(&r, sub) {
                if !faces.contains(&eq) {
                    faces.push(eq);
                }
            }
        });
    }
    let mut out = Vec::new();
    for eq in faces {
        let mut face_region = r.clone();
        for &i in &eq {
            let c = r.constraints[i].clone();
            face_region = face_region.le(c.normal, c.offset);
        }
        let (verts, mut rays) = vertices_and_rays(&face_region)?;
        for &i in &eq {
            rays.push(neg(&mat_vec(&ainv, &r.constraints[i].normal)));
        }
        let region = hull_of(&verts, &rays);
        out.push(NearestCell { face: eq, region });
    }
    Ok(out)
}

/// Nearest point of the closed polyhedron `r` to `x` in the norm of `sp`,
/// by enumerating active sets and checking the KKT conditions exactly.
pub fn project_onto_polyhedron(r: &HalfSpaceRegion, sp: &Space, x: &[Rat]) -> Option<Vector> {
    let r = r.closure();
    if r.contains(x) {
        return Some(x.to_vec());
    }
    let ainv = inverse(&sp.gram).expect("positive definite");
    let m = r.constraints.len();
    let mut found = None;
    for k in 1..=m.min(sp.dim) {
        for_each_subset(m, k, |sub| {
            if found.is_some() {
                return;
            }
            let rows: Mat = sub.iter().map(|&i| r.constraints[i].normal.clone()).collect();
            let dirs: Vec<Vector> = rows.iter().map(|a| mat_vec(&ainv, a)).collect();
            let g: Mat = rows.iter().map(|a| dirs.iter().map(|d| crate::rational::dot(a, d)).collect()).collect();
            let rhs: Vector = sub.iter().map(|&i| -r.constraints[i].slack(x)).collect();
            let Some(lambda) = solve(&g, &rhs) else { return };
            if lambda.iter().any(|l| l.is_negative()) {
                return;
            }
            let mut y = x.to_vec();
            for (l, d) in lambda.iter().zip(&dirs) {
                y = axpy(&y, l, d);
            }
            if r.contains(&y) {
                found = Some(y);
            }
        });
        if found.is_some() {
            break;
        }
    }
    found
}

/// Constraint indices tight at `y`.
pub fn tight_set(r: &HalfSpaceRegion, y: &[Rat]) -> Vec<usize> {
    (0..r.constraints.len()).filter(|&i| r.constraints[i].slack(y).is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio, vec_i};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadrant_four_regions() {
        let sp = Space::euclidean(2);
        let c = Cone::new(vec![vec_i(&[1, 0]), vec_i(&[0, 1])], &sp).unwrap();
        let cells = nearest_face_partition(Polyhedron::Cone(&c), &sp).unwrap();
        assert_eq!(cells.len(), 4);
        let x_ray = cells.iter().find(|c| c.face == vec![0]).unwrap();
        assert!(x_ray.region.contains(&vec_i(&[3, -1])));
        assert!(!x_ray.region.contains(&vec_i(&[3, 1])));
        let origin = cells.iter().find(|c| c.face.is_empty()).unwrap();
        assert!(origin.region.contains(&vec_i(&[-1, -2])));
    }

    #[test]
    fn point_has_single_region() {
        let sp = Space::euclidean(2);
        let p = HalfSpaceRegion::whole(2).eq(vec_i(&[1, 0]), rat(0)).eq(vec_i(&[0, 1]), rat(0));
        let cells = nearest_face_partition(Polyhedron::Region(&p), &sp).unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].region.constraints.is_empty());
    }

    #[test]
    fn segment_three_regions() {
        let sp = Space::euclidean(2);
        let p = HalfSpaceRegion::whole(2).eq(vec_i(&[0, 1]), rat(0)).ge(vec_i(&[1, 0]), rat(0)).le(vec_i(&[1, 0]), rat(1));
        let cells = nearest_face_partition(Polyhedron::Region(&p), &sp).unwrap();
        assert_eq!(cells.len(), 3);
        let slab = cells.iter().find(|c| c.region.contains(&[ratio(1, 2), rat(7)])).unwrap();
        assert!(!slab.region.contains(&[ratio(3, 2), rat(7)]));
    }

    #[test]
    fn partition_agrees_with_projection_oracle() {
        let sp = Space::with_inner_product(vec![vec_i(&[2, 1]), vec_i(&[1, 2])]).unwrap();
        let p = HalfSpaceRegion::whole(2)
            .ge(vec_i(&[1, 0]), rat(0))
            .ge(vec_i(&[0, 1]), rat(0))
            .le(vec_i(&[1, 2]), rat(4));
        let cells = nearest_face_partition(Polyhedron::Region(&p), &sp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: Vector = (0..2).map(|_| ratio(rng.gen_range(-4000..4000), 997)).collect();
            let containing: Vec<&NearestCell> = cells.iter().filter(|c| c.region.contains(&x)).collect();
            assert!(!containing.is_empty());
            let y = project_onto_polyhedron(&p, &sp, &x).unwrap();
            let face = tight_set(&p.closure(), &y);
            assert!(containing.iter().any(|c| c.face == face), "x = {x:?}");
            let interior: Vec<_> = cells.iter().filter(|c| c.region.constraints.iter().all(|k| k.slack(&x).is_positive())).collect();
            assert!(interior.len() <= 1);
        }
    }
}
