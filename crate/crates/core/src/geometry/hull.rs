//! Conversions between half-space and generator descriptions, triangulation
//! and exact volume. All algorithms are brute-force enumerations over
//! subsets of constraints/generators, which is ample at n ≤ 4.

use super::region::{Constraint, HalfSpaceRegion};
use crate::error::{Error, Result};
use crate::linalg::{annihilator, coordinates, det, from_columns, independent_subset, nullspace, rank_of, solve, transpose, Mat};
use crate::lp::{Cmp, Lp};
use crate::rational::{dot, is_zero_vec, primitive, sub, Rat, Vector};
use num_traits::{One, Signed, Zero};

/// Iterate over all `k`-subsets of `0..m` in lexicographic order.
pub fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facets of the full-dimensional cone generated by `gens` in `ℝ^k`
/// (`k = gens[0].len()`): returns `(covector f, indices of generators with f·g = 0)`,
/// every generator satisfying `f·g ≥ 0`.
pub fn cone_facets(gens: &[Vector]) -> Vec<(Vector, Vec<usize>)> {
    let k = gens.first().map_or(0, |g| g.len());
    let mut out: Vec<(Vector, Vec<usize>)> = Vec::new();
    if k == 0 {
        return out;
    }
    if k == 1 {
        for s in [Rat::one(), -Rat::one()] {
            if gens.iter().all(|g| !(&g[0] * &s).is_negative()) {
                let tight: Vec<usize> = (0..gens.len()).filter(|&i| gens[i][0].is_zero()).collect();
                out.push((vec![s], tight));
            }
        }
        return out;
    }
    let m = gens.len();
    for_each_subset(m, k - 1, |sub| {
        let rows: Mat = sub.iter().map(|&i| gens[i].clone()).collect();
        let ns = nullspace(&rows, k);
        if ns.len() != 1 {
            return;
        }
        let mut f = primitive(&ns[0]);
        let mut pos = false;
        let mut negv = false;
        for g in gens {
            let s = dot(&f, g);
            if s.is_positive() {
                pos = true;
            } else if s.is_negative() {
                negv = true;
            }
        }
        if pos && negv {
            return;
        }
        if negv {
            f = crate::rational::neg(&f);
        }
        if !pos && !negv {
            return;
        }
        if out.iter().any(|(g, _)| *g == f) {
            return;
        }
        let tight: Vec<usize> = (0..m).filter(|&i| dot(&f, &gens[i]).is_zero()).collect();
        out.push((f, tight));
    });
    out
}

/// Basis of `Span(vs)` chosen among the vectors themselves.
pub fn span_basis(vs: &[Vector]) -> Vec<Vector> {
    independent_subset(vs).into_iter().map(|i| vs[i].clone()).collect()
}

/// Triangulate the pointed cone generated by `gens` (any ambient dimension,
/// spanning a `k`-dimensional subspace) into simplicial cones given as index
/// sets of size `k`, by recursive pulling from `apex`-preferred generators.
/// `prefer(i)` marks generators that should be pulled first.
pub fn triangulate_cone(gens: &[Vector], prefer: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let idx: Vec<usize> = (0..gens.len()).filter(|&i| !is_zero_vec(&gens[i])).collect();
    triangulate_rec(gens, &idx, prefer)
}

fn triangulate_rec(gens: &[Vector], idx: &[usize], prefer: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let vs: Vec<Vector> = idx.iter().map(|&i| gens[i].clone()).collect();
    let k = rank_of(&vs);
    if k == 0 {
        return Vec::new();
    }
    // Drop duplicate directions.
    let mut uniq: Vec<usize> = Vec::new();
    for &i in idx {
        let p = primitive(&gens[i]);
        if !uniq.iter().any(|&j| primitive(&gens[j]) == p) {
            uniq.push(i);
        }
    }
    if k == 1 {
        return vec![vec![uniq[0]]];
    }
    if uniq.len() == k {
        return vec![uniq];
    }
    let basis = span_basis(&uniq.iter().map(|&i| gens[i].clone()).collect::<Vec<_>>());
    let coords: Vec<Vector> = uniq.iter().map(|&i| coordinates(&basis, &gens[i]).expect("in span")).collect();
    let apex_pos = uniq.iter().position(|&i| prefer(i)).unwrap_or(0);
    let apex = uniq[apex_pos];
    let mut out = Vec::new();
    for (_, tight) in cone_facets(&coords) {
        if tight.contains(&apex_pos) {
            continue;
        }
        let sub: Vec<usize> = tight.iter().map(|&t| uniq[t]).collect();
        for mut s in triangulate_rec(gens, &sub, prefer) {
            s.push(apex);
            out.push(s);
        }
    }
    out
}

/// Generator description of a pointed polyhedron: vertices and extreme rays
/// of the closure of `region`. Fails with `HasLineality` if not pointed.
pub fn vertices_and_rays(region: &HalfSpaceRegion) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let n = region.dim;
    let reg = region.closure().simplified();
    let cons = &reg.constraints;
    if cons.iter().any(|c| is_zero_vec(&c.normal)) {
        return Ok((Vec::new(), Vec::new()));
    }
    let rows: Vec<Vector> = cons.iter().map(|c| c.normal.clone()).collect();
    if rank_of(&rows) < n {
        if reg.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        return Err(Error::HasLineality);
    }
    let m = cons.len();
    let mut verts: Vec<Vector> = Vec::new();
    for_each_subset(m, n, |sub| {
        let a: Mat = sub.iter().map(|&i| cons[i].normal.clone()).collect();
        let b: Vector = sub.iter().map(|&i| cons[i].offset.clone()).collect();
        if let Some(x) = solve(&a, &b) {
            if cons.iter().all(|c| !c.slack(&x).is_negative()) && !verts.contains(&x) {
                verts.push(x);
            }
        }
    });
    let mut rays: Vec<Vector> = Vec::new();
    if n == 1 {
        for d in [vec![Rat::one()], vec![-Rat::one()]] {
            if cons.iter().all(|c| !dot(&c.normal, &d).is_negative()) {
                rays.push(d);
            }
        }
    } else {
        for_each_subset(m, n - 1, |sub| {
            let a: Mat = sub.iter().map(|&i| cons[i].normal.clone()).collect();
            let ns = nullspace(&a, n);
            if ns.len() != 1 {
                return;
            }
            let d = primitive(&ns[0]);
            for cand in [d.clone(), crate::rational::neg(&d)] {
                if cons.iter().all(|c| !dot(&c.normal, &cand).is_negative()) && !rays.contains(&cand) {
                    rays.push(cand);
                }
            }
        });
    }
    if verts.is_empty() {
        rays.clear();
    }
    verts.sort();
    rays.sort();
    Ok((verts, rays))
}

/// Points among `pts` that are not convex combinations of the others.
pub fn extreme_points(pts: &[Vector]) -> Vec<Vector> {
    let mut uniq: Vec<Vector> = Vec::new();
    for p in pts {
        if !uniq.contains(p) {
            uniq.push(p.clone());
        }
    }
    if uniq.len() <= 2 {
        uniq.sort();
        return uniq;
    }
    let n = uniq[0].len();
    let mut keep = Vec::new();
    for (i, p) in uniq.iter().enumerate() {
        let others: Vec<&Vector> = uniq.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q).collect();
        let k = others.len();
        let mut lp = Lp::new(k);
        for d in 0..n {
            lp.add(others.iter().map(|q| q[d].clone()).collect(), Cmp::Eq, p[d].clone());
        }
        lp.add(vec![Rat::one(); k], Cmp::Eq, Rat::one());
        for j in 0..k {
            lp.add(crate::rational::unit(k, j), Cmp::Ge, Rat::zero());
        }
        if lp.feasible_point().is_none() {
            keep.push(p.clone());
        }
    }
    keep.sort();
    keep
}

/// Closed half-space description of `conv(points) + cone(rays)`.
pub fn hull_of(points: &[Vector], rays: &[Vector]) -> HalfSpaceRegion {
    assert!(!points.is_empty(), "hull of no points");
    let n = points[0].len();
    let p0 = points[0].clone();
    let mut dirs: Vec<Vector> = points.iter().skip(1).map(|p| sub(p, &p0)).collect();
    dirs.extend(rays.iter().cloned());
    let dirs: Vec<Vector> = dirs.into_iter().filter(|d| !is_zero_vec(d)).collect();
    let basis = span_basis(&dirs);
    let d = basis.len();
    let mut region = HalfSpaceRegion::whole(n);
    for c in annihilator(&basis, n) {
        let off = dot(&c, &p0);
        region = region.eq(c, off);
    }
    if d == 0 {
        return region;
    }
    // Homogenized generators in ℝ^{d+1}.
    let mut gens: Vec<Vector> = Vec::new();
    for p in points {
        let mut t = coordinates(&basis, &sub(p, &p0)).expect("in affine hull");
        t.push(Rat::one());
        gens.push(t);
    }
    for r in rays {
        let mut t = coordinates(&basis, r).expect("in span");
        t.push(Rat::zero());
        gens.push(t);
    }
    // Left inverse L (d × n) of the basis matrix N (n × d): L = (NᵀN)⁻¹Nᵀ.
    let nmat = from_columns(&basis, n);
    let nt = transpose(&nmat);
    let ntn = crate::linalg::mat_mul(&nt, &nmat);
    let inv = crate::linalg::inverse(&ntn).expect("independent basis");
    let left = crate::linalg::mat_mul(&inv, &nt);
    for (f, _) in cone_facets(&gens) {
        let alpha = &f[..d];
        let beta = &f[d];
        if is_zero_vec(alpha) {
            continue;
        }
        // α·L(x − p0) + β ≥ 0.
        let cov: Vector = (0..n).map(|j| (0..d).map(|i| &alpha[i] * &left[i][j]).sum()).collect();
        let off = dot(&cov, &p0) - beta;
        region.push(Constraint::new(cov, off, false));
    }
    region.simplified()
}

/// A closed polytope stored with both descriptions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VPolytope {
    pub vertices: Vec<Vector>,
    pub region: HalfSpaceRegion,
}

impl VPolytope {
    pub fn from_points(points: &[Vector]) -> Self {
        let vertices = extreme_points(points);
        let region = hull_of(&vertices, &[]);
        VPolytope { vertices, region }
    }

    pub fn from_region(region: &HalfSpaceRegion) -> Result<Self> {
        let (v, r) = vertices_and_rays(region)?;
        if !r.is_empty() {
            return Err(Error::UnboundedTerm);
        }
        if v.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(VPolytope::from_points(&v))
    }

    pub fn dim(&self) -> usize {
        let p0 = &self.vertices[0];
        rank_of(&self.vertices.iter().map(|v| sub(v, p0)).collect::<Vec<_>>())
    }

    pub fn ambient(&self) -> usize {
        self.vertices[0].len()
    }

    /// Minkowski sum.
    pub fn minkowski(&self, other: &VPolytope) -> VPolytope {
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(crate::rational::add(a, b));
            }
        }
        VPolytope::from_points(&pts)
    }

    /// `−P`.
    pub fn reflect(&self) -> VPolytope {
        let mut v: Vec<Vector> = self.vertices.iter().map(|x| crate::rational::neg(x)).collect();
        v.sort();
        VPolytope { vertices: v, region: self.region.reflect().simplified() }
    }

    /// All nonempty faces (including the polytope itself) as sorted vertex-index sets.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        let all: Vec<usize> = (0..nv).collect();
        let mut faces: Vec<Vec<usize>> = vec![all.clone()];
        let mut frontier: Vec<Vec<usize>> = Vec::new();
        for c in &self.region.constraints {
            let t: Vec<usize> = (0..nv).filter(|&i| c.slack(&self.vertices[i]).is_zero()).collect();
            if !t.is_empty() && t.len() < nv && !faces.contains(&t) {
                faces.push(t.clone());
                frontier.push(t);
            }
        }
        let facets = faces.clone();
        while let Some(f) = frontier.pop() {
            for g in &facets {
                let inter: Vec<usize> = f.iter().copied().filter(|i| g.contains(i)).collect();
                if !inter.is_empty() && !faces.contains(&inter) {
                    faces.push(inter.clone());
                    frontier.push(inter);
                }
            }
        }
        faces.sort_by_key(|f| (f.len(), f.clone()));
        faces
    }

    /// Face spanned by the given vertices, as its own polytope.
    pub fn face(&self, idx: &[usize]) -> VPolytope {
        let pts: Vec<Vector> = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        VPolytope { region: hull_of(&pts, &[]), vertices: pts }
    }

    /// Barycenter of the vertices (a relative-interior point).
    pub fn barycenter(&self) -> Vector {
        barycenter(&self.vertices)
    }

    /// Exact `dim`-dimensional volume in ambient coordinates (0 if lower-dimensional).
    pub fn volume(&self) -> Rat {
        simplex_volume_sum(&self.vertices)
    }
}

pub fn barycenter(pts: &[Vector]) -> Vector {
    let n = pts[0].len();
    let k = Rat::from_integer((pts.len() as i64).into());
    (0..n).map(|i| pts.iter().map(|p| p[i].clone()).sum::<Rat>() / &k).collect()
}

/// Triangulate a full-dimensional polytope given by its vertices into simplices
/// (index sets of size n+1). Returns an empty list if lower-dimensional.
pub fn triangulate_polytope(vertices: &[Vector]) -> Vec<Vec<usize>> {
    if vertices.is_empty() {
        return Vec::new();
    }
    let n = vertices[0].len();
    let gens: Vec<Vector> = vertices.iter().map(|v| {
        let mut g = v.clone();
        g.push(Rat::one());
        g
    }).collect();
    if rank_of(&gens) != n + 1 {
        return Vec::new();
    }
    triangulate_cone(&gens, &|_| true)
}

/// Exact n-volume of conv(vertices) in `ℝⁿ`.
pub fn simplex_volume_sum(vertices: &[Vector]) -> Rat {
    if vertices.is_empty() {
        return Rat::zero();
    }
    let n = vertices[0].len();
    if n == 0 {
        return Rat::one();
    }
    let mut fact = Rat::one();
    for i in 2..=n {
        fact *= Rat::from_integer((i as i64).into());
    }
    let mut total = Rat::zero();
    for s in triangulate_polytope(vertices) {
        let v0 = &vertices[s[0]];
        let cols: Vec<Vector> = s[1..].iter().map(|&i| sub(&vertices[i], v0)).collect();
        total += det(&from_columns(&cols, n)).abs();
    }
    total / fact
}

/// Exact volume of the closure of a bounded region (0 if lower-dimensional).
pub fn region_volume(region: &HalfSpaceRegion) -> Result<Rat> {
    let (v, r) = vertices_and_rays(region)?;
    if !r.is_empty() {
        return Err(Error::DivergentChain);
    }
    Ok(simplex_volume_sum(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio, vec_i};

    #[test]
    fn subsets_enumeration() {
        let mut n = 0;
        for_each_subset(5, 2, |_| n += 1);
        assert_eq!(n, 10);
        let mut n = 0;
        for_each_subset(3, 3, |_| n += 1);
        assert_eq!(n, 1);
        let mut n = 0;
        for_each_subset(3, 0, |_| n += 1);
        assert_eq!(n, 1);
    }

    #[test]
    fn square_vertices_and_volume() {
        let r = HalfSpaceRegion::whole(2)
            .ge(vec_i(&[1, 0]), rat(0))
            .le(vec_i(&[1, 0]), rat(2))
            .ge(vec_i(&[0, 1]), rat(0))
            .le(vec_i(&[0, 1]), rat(3));
        let (v, rays) = vertices_and_rays(&r).unwrap();
        assert_eq!(v.len(), 4);
        assert!(rays.is_empty());
        assert_eq!(region_volume(&r).unwrap(), rat(6));
    }

    #[test]
    fn quadrant_rays() {
        let r = HalfSpaceRegion::whole(2).ge(vec_i(&[1, 0]), rat(1)).ge(vec_i(&[0, 1]), rat(0));
        let (v, rays) = vertices_and_rays(&r).unwrap();
        assert_eq!(v, vec![vec_i(&[1, 0])]);
        assert_eq!(rays, vec![vec_i(&[0, 1]), vec_i(&[1, 0])]);
    }

    #[test]
    fn hull_round_trip() {
        let pts = vec![vec_i(&[0, 0]), vec_i(&[2, 0]), vec_i(&[0, 2]), vec_i(&[1, 1]), vec_i(&[1, 0])];
        let p = VPolytope::from_points(&pts);
        assert_eq!(p.vertices.len(), 3);
        assert_eq!(p.volume(), rat(2));
        assert_eq!(p.faces().len(), 7);
        assert!(p.region.contains(&[ratio(1, 2), ratio(1, 2)]));
    }

    #[test]
    fn lower_dimensional_hull() {
        let p = VPolytope::from_points(&[vec_i(&[0, 0, 0]), vec_i(&[1, 1, 0])]);
        assert_eq!(p.dim(), 1);
        assert!(p.region.contains(&[ratio(1, 2), ratio(1, 2), rat(0)]));
        assert!(!p.region.contains(&[ratio(1, 2), ratio(1, 3), rat(0)]));
    }

    #[test]
    fn cube_volume_3d() {
        let mut pts = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    pts.push(vec_i(&[a, b, c]));
                }
            }
        }
        let p = VPolytope::from_points(&pts);
        assert_eq!(p.volume(), rat(1));
        assert_eq!(p.faces().len(), 27);
    }
}
