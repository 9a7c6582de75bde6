//! Convolution of bounded chains (`1_P ∗ 1_Q = 1_{P+Q}` for closed convex
//! polytopes, extended bilinearly), the convolution inverse of a polytope and
//! virtual polytopes as formal differences.

use super::Chain;
use crate::error::{Error, Result};
use crate::geometry::hull::VPolytope;
use crate::geometry::polytope::{realize_polytope, SupportVector};
use crate::geometry::region::HalfSpaceRegion;
use crate::rational::{sign_pow, Rat};
use num_traits::Zero;

/// Rewrite `1_R` for a bounded region (strict constraints allowed) as a
/// combination of indicators of closed polytopes: the faces of its closure.
pub fn closed_decomposition(region: &HalfSpaceRegion) -> Result<Vec<(Rat, VPolytope)>> {
    let closure = region.closure();
    if closure.is_empty() {
        return Ok(Vec::new());
    }
    if !closure.is_bounded() {
        return Err(Error::UnboundedTerm);
    }
    let p = VPolytope::from_region(&closure)?;
    if !region.constraints.iter().any(|c| c.strict) {
        return Ok(vec![(Rat::from_integer(1.into()), p)]);
    }
    let faces = p.faces();
    let polys: Vec<VPolytope> = faces.iter().map(|f| p.face(f)).collect();
    let dims: Vec<usize> = polys.iter().map(|q| q.dim()).collect();
    let kept: Vec<bool> = polys.iter().map(|q| region.contains(&q.barycenter())).collect();
    let mut out = Vec::new();
    for (g, gf) in faces.iter().enumerate() {
        let mut c = Rat::zero();
        for (f, ff) in faces.iter().enumerate() {
            if kept[f] && gf.iter().all(|i| ff.contains(i)) {
                c += sign_pow(dims[f] - dims[g]);
            }
        }
        if !c.is_zero() {
            out.push((c, polys[g].clone()));
        }
    }
    Ok(out)
}

fn merge(terms: &mut Vec<(Rat, VPolytope)>, c: Rat, p: VPolytope) {
    if let Some(e) = terms.iter_mut().find(|e| e.1.vertices == p.vertices) {
        e.0 += c;
    } else {
        terms.push((c, p));
    }
}

/// A bounded chain as a combination of closed polytopes.
pub fn to_closed_polytopes(c: &Chain) -> Result<Vec<(Rat, VPolytope)>> {
    let mut out: Vec<(Rat, VPolytope)> = Vec::new();
    for (k, r) in &c.terms {
        for (d, p) in closed_decomposition(r)? {
            merge(&mut out, k * d, p);
        }
    }
    out.retain(|(k, _)| !k.is_zero());
    Ok(out)
}

/// Chain of a combination of closed polytopes.
pub fn from_closed_polytopes(dim: usize, terms: &[(Rat, VPolytope)]) -> Chain {
    let mut c = Chain::zero(dim);
    for (k, p) in terms {
        c.push(k.clone(), p.region.clone());
    }
    c.normalized()
}

/// Convolution of two bounded chains. Unbounded terms are rejected.
pub fn convolve(c1: &Chain, c2: &Chain) -> Result<Chain> {
    if c1.dim != c2.dim {
        return Err(Error::DimensionMismatch { expected: c1.dim, got: c2.dim });
    }
    let a = to_closed_polytopes(c1)?;
    let b = to_closed_polytopes(c2)?;
    let mut out: Vec<(Rat, VPolytope)> = Vec::new();
    for (x, p) in &a {
        for (y, q) in &b {
            merge(&mut out, x * y, p.minkowski(q));
        }
    }
    out.retain(|(k, _)| !k.is_zero());
    Ok(from_closed_polytopes(c1.dim, &out))
}

/// The convolution inverse `Σ_Q (−1)^{dim Q} 1_{−Q}` of a closed polytope `P`
/// (sum over the nonempty faces `Q`); it is the indicator of `−relint P` up to sign.
pub fn polytope_inverse_chain(p: &VPolytope) -> Chain {
    let mut c = Chain::zero(p.ambient());
    for f in p.faces() {
        let q = p.face(&f);
        c.push(sign_pow(q.dim()), q.reflect().region);
    }
    c.normalized()
}

/// A virtual polytope `P₁ − P₂` as an ordered pair of polytopes.
#[derive(Clone, Debug)]
pub struct VirtualPolytopePair {
    pub minuend: VPolytope,
    pub subtrahend: VPolytope,
}

impl VirtualPolytopePair {
    pub fn new(minuend: VPolytope, subtrahend: VPolytope) -> Self {
        VirtualPolytopePair { minuend, subtrahend }
    }

    /// Realize both support vectors (each must be an honest polytope on the fan).
    pub fn from_supports(s1: &SupportVector, s2: &SupportVector) -> Result<Self> {
        Ok(VirtualPolytopePair {
            minuend: realize_polytope(s1)?.to_vpolytope(),
            subtrahend: realize_polytope(s2)?.to_vpolytope(),
        })
    }

    /// `(P₁, P₂) ~ (P₁', P₂')` iff `P₁ + P₂' = P₁' + P₂`.
    pub fn equivalent(&self, other: &VirtualPolytopePair) -> bool {
        self.minuend.minkowski(&other.subtrahend).vertices == other.minuend.minkowski(&self.subtrahend).vertices
    }
}

/// `1_{P₁} ∗ (1_{P₂})^{−1}`, the characteristic function of a virtual polytope.
pub fn virtual_characteristic(vp: &VirtualPolytopePair) -> Result<Chain> {
    let a = Chain::indicator(vp.minuend.region.clone());
    convolve(&a, &polytope_inverse_chain(&vp.subtrahend))
}

#[cfg(test)]
mod tests {
    use super::super::{chains_equal, EqualityMode};
    use super::*;
    use crate::rational::{rat, vec_i};

    fn seg(lo: i64, hi: i64) -> VPolytope {
        VPolytope::from_points(&[vec_i(&[lo]), vec_i(&[hi])])
    }

    #[test]
    fn segments_add() {
        let c = convolve(&Chain::indicator(seg(0, 1).region), &Chain::indicator(seg(2, 5).region)).unwrap();
        assert!(chains_equal(&c, &Chain::indicator(seg(2, 6).region), &EqualityMode::Exact).unwrap().holds());
    }

    #[test]
    fn open_interval_convolution() {
        // 1_[0,1] ∗ (−1)·1_(−1,0) = 1_{0}.
        let open = HalfSpaceRegion::whole(1).gt(vec_i(&[1]), rat(-1)).lt(vec_i(&[1]), rat(0));
        let c = convolve(&Chain::indicator(seg(0, 1).region), &Chain::term(rat(-1), open)).unwrap();
        let zero = Chain::indicator(HalfSpaceRegion::whole(1).eq(vec_i(&[1]), rat(0)));
        assert!(chains_equal(&c, &zero, &EqualityMode::Exact).unwrap().holds());
    }

    #[test]
    fn inverse_is_inverse() {
        let sq = VPolytope::from_points(&[vec_i(&[0, 0]), vec_i(&[2, 0]), vec_i(&[0, 1]), vec_i(&[2, 1])]);
        let c = convolve(&Chain::indicator(sq.region.clone()), &polytope_inverse_chain(&sq)).unwrap();
        let origin = Chain::indicator(HalfSpaceRegion::whole(2).eq(vec_i(&[1, 0]), rat(0)).eq(vec_i(&[0, 1]), rat(0)));
        assert!(chains_equal(&c, &origin, &EqualityMode::Exact).unwrap().holds());
    }

    #[test]
    fn virtual_difference_of_segments() {
        // [0,3] − [0,1] = [0,2].
        let vp = VirtualPolytopePair::new(seg(0, 3), seg(0, 1));
        let c = virtual_characteristic(&vp).unwrap();
        assert!(chains_equal(&c, &Chain::indicator(seg(0, 2).region), &EqualityMode::Exact).unwrap().holds());
        assert!(vp.equivalent(&VirtualPolytopePair::new(seg(0, 4), seg(0, 2))));
    }
}
