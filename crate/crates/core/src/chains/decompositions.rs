//! Brianchon–Gram and Lawrence–Varchenko decompositions, and the chains `γ_σ`
//! whose polyhedra `Γ_σ` appear in the polynomiality identity.

use super::Chain;
use crate::error::{Error, Result};
use crate::geometry::polytope::{Direction, SupportVector};
use crate::geometry::region::HalfSpaceRegion;
use crate::linalg::{from_columns, inverse, mat_vec};
use crate::rational::{fmt_vec, sign_pow, Rat, Vector};
use num_traits::{Signed, Zero};

/// Brianchon–Gram decomposition of a polytope over all cones σ of its fan:
/// inward `Σ (−1)^{n−dim σ} 1_{T⁺_σ}`, outward `Σ (−1)^{dim σ} 1_{T⁻_σ}`.
/// Both equal `1_Δ` for an honest polytope `Δ`.
pub fn brianchon_gram(s: &SupportVector, dir: Direction) -> Result<Chain> {
    let fan = &s.fan;
    let n = fan.dim();
    let mut c = Chain::zero(n);
    for sigma in 0..fan.cones.len() {
        let d = fan.cone_dim(sigma);
        let sign = match dir {
            Direction::Inward => sign_pow(n - d),
            Direction::Outward => sign_pow(d),
        };
        c.push(sign, s.tangent_cone(sigma, dir)?);
    }
    Ok(c.normalized())
}

/// Lawrence–Varchenko decomposition `Σ_v (−1)^{n_v} 1_{C_v}` for a generic
/// direction ξ: at each (virtual) vertex the edges with `⟨e, ξ⟩ < 0` are
/// flipped and the corresponding facets of the polarized cone opened.
/// Works for honest and virtual polytopes alike.
pub fn lawrence_varchenko(s: &SupportVector, xi: &[Rat]) -> Result<Chain> {
    let fan = &s.fan;
    let sp = s.space();
    sp.check_dim(xi)?;
    let n = fan.dim();
    let mut c = Chain::zero(n);
    for &sigma in &fan.maximal {
        if fan.cone_dim(sigma) != n {
            return Err(Error::NotComplete(format!("maximal cone {sigma} is not full-dimensional")));
        }
        let v = s.virtual_vertex(sigma)?;
        let mut edges: Vec<Vector> = Vec::with_capacity(n);
        let mut flipped: Vec<bool> = Vec::with_capacity(n);
        for e in s.edge_vectors(sigma) {
            let p = sp.ip(&e, xi);
            if p.is_zero() {
                return Err(Error::NonGenericXi { vertex: fmt_vec(&v), edge: fmt_vec(&e) });
            }
            if p.is_negative() {
                edges.push(crate::rational::neg(&e));
                flipped.push(true);
            } else {
                edges.push(e);
                flipped.push(false);
            }
        }
        // x = v + Σ c_i w'_i with c_i ≥ 0 (kept) or c_i > 0 (flipped).
        let inv = inverse(&from_columns(&edges, n)).expect("edge vectors form a basis");
        let rv = mat_vec(&inv, &v);
        let mut r = HalfSpaceRegion::whole(n);
        for i in 0..n {
            r = if flipped[i] { r.gt(inv[i].clone(), rv[i].clone()) } else { r.ge(inv[i].clone(), rv[i].clone()) };
        }
        let k = flipped.iter().filter(|&&f| f).count();
        c.push(sign_pow(k), r);
    }
    Ok(c.normalized())
}

/// The chain `γ_σ = Σ_{τ⪯σ} (−1)^{dim τ} 1{⟨x,b_j⟩ ≥ 0, j ∉ τ} · 1_{T⁻_τ}`,
/// whose restriction to `Span(σ)` is the indicator of the polyhedron `Γ_σ`
/// (extended constantly along `σ^⊥`). Here `b_j` are the facet normals of σ
/// and the hyperplanes through the apex `apex_in_span(σ)`.
pub fn gamma_chain(s: &SupportVector, sigma: usize) -> Result<Chain> {
    let fan = &s.fan;
    let fc = fan.cone(sigma)?;
    let sp = s.space();
    let n = fan.dim();
    let d = fc.rays.len();
    let mut c = Chain::zero(n);
    for mask in 0u32..(1u32 << d) {
        let mut r = HalfSpaceRegion::whole(n);
        for j in 0..d {
            if mask & (1 << j) == 0 {
                r = r.ge(sp.covector(&fc.cone.facet_normals[j]), Rat::zero());
            } else {
                let rho = fc.rays[j];
                r = r.gt(sp.covector(&fan.rays[rho]), s.h(rho));
            }
        }
        c.push(sign_pow(mask.count_ones() as usize), r);
    }
    Ok(c.normalized())
}
