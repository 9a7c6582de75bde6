//! The incidence algebra of the face poset of a simplicial cone, with
//! rational or chain-valued scalars; Möbius inversion; and machine
//! verification of the Langlands combinatorial lemma.
//!
//! Chain-valued scalars multiply pointwise (`1_A · 1_B = 1_{A∩B}`), not by
//! convolution.

use crate::chains::{chains_equal, Chain, Equality, EqualityMode};
use crate::error::{Error, Result};
use crate::geometry::cone::{dual_basis, Cone};
use crate::geometry::polytope::{Direction, SupportVector};
use crate::geometry::region::HalfSpaceRegion;
use crate::geometry::space::Space;
use crate::rational::{sign_pow, Rat, Vector};
use num_traits::{One, Zero};

/// The face poset of a simplicial cone of dimension `d`: faces are subsets of
/// its rays, encoded as bitmasks, ordered by inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FacePoset {
    pub rank: usize,
}

impl FacePoset {
    pub fn boolean(rank: usize) -> FacePoset {
        assert!(rank <= 12, "face poset too large");
        FacePoset { rank }
    }

    pub fn of_cone(c: &Cone) -> Result<FacePoset> {
        if !c.simplicial {
            return Err(Error::NotSimplicial);
        }
        Ok(FacePoset::boolean(c.rays.len()))
    }

    pub fn len(&self) -> usize {
        1 << self.rank
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The top element (the cone itself).
    pub fn top(&self) -> u32 {
        (1u32 << self.rank) - 1
    }

    pub fn le(&self, a: u32, b: u32) -> bool {
        a & !b == 0
    }

    pub fn dim(&self, a: u32) -> usize {
        a.count_ones() as usize
    }

    /// All intervals `(a, b)` with `a ⪯ b`.
    pub fn intervals(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for b in 0..self.len() as u32 {
            let mut a = b;
            loop {
                out.push((a, b));
                if a == 0 {
                    break;
                }
                a = (a - 1) & b;
            }
        }
        out.sort();
        out
    }

    /// Elements `z` with `a ⪯ z ⪯ b`.
    pub fn between(&self, a: u32, b: u32) -> Vec<u32> {
        let free = b & !a;
        let mut out = Vec::new();
        let mut s = free;
        loop {
            out.push(a | s);
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        out.sort();
        out
    }
}

/// A commutative scalar ring for incidence elements.
pub trait Scalar: Clone {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// The zero of the ring this scalar belongs to.
    fn zero_like(&self) -> Self;
}

impl Scalar for Rat {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
}

impl Scalar for Chain {
    fn add(&self, other: &Self) -> Self {
        Chain::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Chain::mul(self, other)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn zero_like(&self) -> Self {
        Chain::zero(self.dim)
    }
}

/// A function on the intervals of a face poset; missing entries are zero.
#[derive(Clone, Debug)]
pub struct IncidenceElement<S: Scalar> {
    pub poset: FacePoset,
    values: Vec<Option<S>>,
}

impl<S: Scalar> IncidenceElement<S> {
    pub fn zero(poset: FacePoset) -> Self {
        IncidenceElement { poset, values: vec![None; poset.len() * poset.len()] }
    }

    /// Build from a function on intervals.
    pub fn from_fn(poset: FacePoset, mut f: impl FnMut(u32, u32) -> S) -> Self {
        let mut e = Self::zero(poset);
        for (a, b) in poset.intervals() {
            e.set(a, b, f(a, b));
        }
        e
    }

    fn slot(&self, a: u32, b: u32) -> usize {
        a as usize * self.poset.len() + b as usize
    }

    pub fn get(&self, a: u32, b: u32) -> Option<&S> {
        if !self.poset.le(a, b) {
            return None;
        }
        self.values[self.slot(a, b)].as_ref()
    }

    pub fn set(&mut self, a: u32, b: u32, v: S) {
        assert!(self.poset.le(a, b), "not an interval");
        let i = self.slot(a, b);
        self.values[i] = if v.is_zero() { None } else { Some(v) };
    }

    /// `δ`, with the given unit scalar.
    pub fn delta(poset: FacePoset, one: S) -> Self {
        Self::from_fn(poset, |a, b| if a == b { one.clone() } else { one.zero_like() })
    }

    /// `ζ`, with the given unit scalar.
    pub fn zeta(poset: FacePoset, one: S) -> Self {
        Self::from_fn(poset, |_, _| one.clone())
    }
}

/// `(F ∗ G)(a, b) = Σ_{a⪯z⪯b} F(a, z) G(z, b)`.
pub fn incidence_convolve<S: Scalar>(f: &IncidenceElement<S>, g: &IncidenceElement<S>) -> Result<IncidenceElement<S>> {
    if f.poset != g.poset {
        return Err(Error::PosetMismatch);
    }
    let p = f.poset;
    let mut out = IncidenceElement::zero(p);
    for (a, b) in p.intervals() {
        let mut acc: Option<S> = None;
        for z in p.between(a, b) {
            if let (Some(x), Some(y)) = (f.get(a, z), g.get(z, b)) {
                let t = x.mul(y);
                acc = Some(match acc {
                    None => t,
                    Some(s) => s.add(&t),
                });
            }
        }
        if let Some(v) = acc {
            out.set(a, b, v);
        }
    }
    Ok(out)
}

/// Möbius function of the face poset, by the recursion
/// `μ(a,a) = 1`, `μ(a,b) = −Σ_{a⪯z≺b} μ(a,z)`.
pub fn mobius(poset: FacePoset) -> IncidenceElement<Rat> {
    let mut mu = IncidenceElement::zero(poset);
    let mut ivs = poset.intervals();
    ivs.sort_by_key(|&(a, b)| (a, poset.dim(b)));
    let mut table = vec![Rat::zero(); poset.len() * poset.len()];
    for (a, b) in ivs {
        let v = if a == b {
            Rat::one()
        } else {
            -poset.between(a, b).into_iter().filter(|&z| z != b).map(|z| table[a as usize * poset.len() + z as usize].clone()).sum::<Rat>()
        };
        table[a as usize * poset.len() + b as usize] = v.clone();
        mu.set(a, b, v);
    }
    mu
}

/// Equality of rational incidence elements.
pub fn rational_equal(f: &IncidenceElement<Rat>, g: &IncidenceElement<Rat>) -> bool {
    f.poset == g.poset && f.poset.intervals().into_iter().all(|(a, b)| f.get(a, b) == g.get(a, b))
}

/// A simplicial cone with the per-face data needed for chain-valued elements.
#[derive(Clone, Debug)]
pub struct ConeFaces {
    pub space: Space,
    pub rays: Vec<Vector>,
    pub poset: FacePoset,
}

impl ConeFaces {
    pub fn new(c: &Cone, sp: &Space) -> Result<ConeFaces> {
        let poset = FacePoset::of_cone(c)?;
        Ok(ConeFaces { space: sp.clone(), rays: c.rays.clone(), poset })
    }

    fn face_rays(&self, mask: u32) -> (Vec<usize>, Vec<Vector>) {
        let idx: Vec<usize> = (0..self.rays.len()).filter(|&j| mask & (1 << j) != 0).collect();
        let ws = idx.iter().map(|&j| self.rays[j].clone()).collect();
        (idx, ws)
    }

    /// `C_{τ'}^{τ}`: the inward tangent cone of τ' along its face τ, cut out
    /// by the facet normals of τ' (inside its span) opposite the rays of
    /// τ' not in τ.
    pub fn tangent_cone(&self, tau: u32, tau2: u32) -> HalfSpaceRegion {
        let (idx, ws) = self.face_rays(tau2);
        let bs = dual_basis(&ws, &self.space);
        let mut r = HalfSpaceRegion::whole(self.space.dim);
        for (k, &j) in idx.iter().enumerate() {
            if tau & (1 << j) == 0 {
                r = r.ge(self.space.covector(&bs[k]), Rat::zero());
            }
        }
        r
    }

    /// The dual tangent cone for the interval `(τ, τ')`: the cone
    /// `{⟨x, π_{τ^⊥} w_k⟩ ≥ 0 : k ∈ τ' ∖ τ}`, where `π_{τ^⊥}` projects
    /// orthogonally to `Span(τ)`.
    pub fn dual_tangent_cone(&self, tau: u32, tau2: u32) -> HalfSpaceRegion {
        let (_, wt) = self.face_rays(tau);
        let mut r = HalfSpaceRegion::whole(self.space.dim);
        for j in 0..self.rays.len() {
            if tau2 & (1 << j) != 0 && tau & (1 << j) == 0 {
                let p = self.space.project_perp(&wt, &self.rays[j]);
                r = r.ge(self.space.covector(&crate::rational::primitive(&p)), Rat::zero());
            }
        }
        r
    }
}

/// The chain-valued elements `F(τ,τ') = (−1)^{dim τ} 1_{C_{τ'}^{τ}}` and
/// `G(τ,τ') = (−1)^{dim τ} 1_{(dual tangent cone)}` of the Langlands lemma.
pub fn langlands_elements(c: &Cone, sp: &Space) -> Result<(IncidenceElement<Chain>, IncidenceElement<Chain>)> {
    let cf = ConeFaces::new(c, sp)?;
    let p = cf.poset;
    let f = IncidenceElement::from_fn(p, |a, b| Chain::term(sign_pow(p.dim(a)), cf.tangent_cone(a, b)));
    let g = IncidenceElement::from_fn(p, |a, b| Chain::term(sign_pow(p.dim(a)), cf.dual_tangent_cone(a, b)));
    Ok((f, g))
}

/// Per-interval outcome of a Langlands verification.
#[derive(Clone, Debug)]
pub struct IntervalCheck {
    pub interval: (u32, u32),
    /// Which product was checked: `"F*G"` or `"G*F"`.
    pub product: &'static str,
    pub result: Equality,
}

/// Report of [`verify_langlands`].
#[derive(Clone, Debug)]
pub struct LanglandsReport {
    pub dim: usize,
    pub intervals: usize,
    pub failures: Vec<IntervalCheck>,
}

impl LanglandsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_is_delta(e: &IncidenceElement<Chain>, n: usize, product: &'static str, mode: &EqualityMode, failures: &mut Vec<IntervalCheck>) -> Result<()> {
    let one = Chain::constant(n, Rat::one());
    let zero = Chain::zero(n);
    for (a, b) in e.poset.intervals() {
        let lhs = e.get(a, b).cloned().unwrap_or_else(|| Chain::zero(n));
        let rhs = if a == b { &one } else { &zero };
        let r = chains_equal(&lhs, rhs, mode)?;
        if !r.holds() {
            failures.push(IntervalCheck { interval: (a, b), product, result: r });
        }
    }
    Ok(())
}

/// Verify `F ∗ G = G ∗ F = δ` on every interval of the face poset of `c`.
pub fn verify_langlands(c: &Cone, sp: &Space, mode: &EqualityMode) -> Result<LanglandsReport> {
    let (f, g) = langlands_elements(c, sp)?;
    let n = sp.dim;
    let mut failures = Vec::new();
    check_is_delta(&incidence_convolve(&f, &g)?, n, "F*G", mode, &mut failures)?;
    check_is_delta(&incidence_convolve(&g, &f)?, n, "G*F", mode, &mut failures)?;
    Ok(LanglandsReport { dim: c.rays.len(), intervals: f.poset.intervals().len(), failures })
}

/// Row elements over the face poset of a fan cone σ: `H(0,τ) = 1_{T⁻_{Δ,τ}}`
/// and `L(0,τ) = γ_{Δ,τ}`, other intervals zero.
pub fn gamma_rows(s: &SupportVector, sigma: usize) -> Result<(IncidenceElement<Chain>, IncidenceElement<Chain>)> {
    let fan = &s.fan;
    let fc = fan.cone(sigma)?;
    let poset = FacePoset::of_cone(&fc.cone)?;
    let mut h = IncidenceElement::zero(poset);
    let mut l = IncidenceElement::zero(poset);
    for mask in 0..poset.len() as u32 {
        let rays: Vec<usize> = (0..fc.rays.len()).filter(|&j| mask & (1 << j) != 0).map(|j| fc.rays[j]).collect();
        let tau = fan.cone_index(&rays).ok_or(Error::UnknownCone(sigma))?;
        h.set(0, mask, Chain::indicator(s.tangent_cone(tau, Direction::Outward)?));
        l.set(0, mask, crate::chains::gamma_chain(s, tau)?);
    }
    Ok((h, l))
}

/// Report of [`verify_gamma_inversion`].
#[derive(Clone, Debug)]
pub struct GammaInversionReport {
    /// Faces τ ⪯ σ (as masks) where `L = H ∗ F` failed.
    pub forward_failures: Vec<(u32, Equality)>,
    /// Faces τ ⪯ σ where `H = L ∗ G` failed.
    pub inverse_failures: Vec<(u32, Equality)>,
}

impl GammaInversionReport {
    pub fn passed(&self) -> bool {
        self.forward_failures.is_empty() && self.inverse_failures.is_empty()
    }
}

/// Check `L(0,τ) = (H ∗ F)(0,τ)` and, after convolving on the right with G,
/// `(L ∗ G)(0,τ) = H(0,τ)`: the latter expresses each `1_{T⁻_{Δ,σ}}` as
/// `Σ_{τ⪯σ} γ_{Δ,τ} · G(τ,σ)`.
pub fn verify_gamma_inversion(s: &SupportVector, sigma: usize, mode: &EqualityMode) -> Result<GammaInversionReport> {
    let fc = s.fan.cone(sigma)?;
    let (f, g) = langlands_elements(&fc.cone, s.space())?;
    let (h, l) = gamma_rows(s, sigma)?;
    let n = s.fan.dim();
    let hf = incidence_convolve(&h, &f)?;
    let lg = incidence_convolve(&l, &g)?;
    let zero = Chain::zero(n);
    let mut forward_failures = Vec::new();
    let mut inverse_failures = Vec::new();
    for mask in 0..f.poset.len() as u32 {
        let get = |e: &IncidenceElement<Chain>| e.get(0, mask).cloned().unwrap_or_else(|| zero.clone());
        let r = chains_equal(&get(&hf), &get(&l), mode)?;
        if !r.holds() {
            forward_failures.push((mask, r));
        }
        let r = chains_equal(&get(&lg), &get(&h), mode)?;
        if !r.holds() {
            inverse_failures.push((mask, r));
        }
    }
    Ok(GammaInversionReport { forward_failures, inverse_failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fan::examples::*;
    use crate::rational::{rat, vec_i};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn zeta_mobius_delta() {
        for d in 0..=5 {
            let p = FacePoset::boolean(d);
            let mu = mobius(p);
            let z = IncidenceElement::zeta(p, Rat::one());
            let delta = IncidenceElement::delta(p, Rat::one());
            assert!(rational_equal(&incidence_convolve(&z, &mu).unwrap(), &delta));
            assert!(rational_equal(&incidence_convolve(&mu, &z).unwrap(), &delta));
            for (a, b) in p.intervals() {
                assert_eq!(mu.get(a, b).cloned().unwrap(), sign_pow(p.dim(b) - p.dim(a)));
            }
        }
    }

    #[test]
    fn associativity_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = FacePoset::boolean(3);
        for _ in 0..10 {
            let mut rnd = || IncidenceElement::from_fn(p, |_, _| rat(rng.gen_range(-3..=3)));
            let (a, b, c) = (rnd(), rnd(), rnd());
            let l = incidence_convolve(&incidence_convolve(&a, &b).unwrap(), &c).unwrap();
            let r = incidence_convolve(&a, &incidence_convolve(&b, &c).unwrap()).unwrap();
            assert!(rational_equal(&l, &r));
            let delta = IncidenceElement::delta(p, Rat::one());
            assert!(rational_equal(&incidence_convolve(&a, &delta).unwrap(), &a));
        }
    }

    #[test]
    fn langlands_half_line_and_quadrant() {
        for rays in [vec![vec_i(&[1])], vec![vec_i(&[1, 0]), vec_i(&[0, 1])], vec![vec_i(&[1, 0]), vec_i(&[1, 1])]] {
            let sp = Space::euclidean(rays[0].len());
            let c = Cone::new(rays, &sp).unwrap();
            let rep = verify_langlands(&c, &sp, &EqualityMode::Exact).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures);
        }
    }

    #[test]
    fn langlands_in_a2_metric() {
        let sp = Space::with_inner_product(vec![vec_i(&[2, 1]), vec_i(&[1, 2])]).unwrap();
        let c = Cone::new(vec![vec_i(&[1, 0]), vec_i(&[0, 1])], &sp).unwrap();
        assert!(verify_langlands(&c, &sp, &EqualityMode::Exact).unwrap().passed());
    }

    #[test]
    fn gamma_inversion_on_rectangle() {
        let fan = Arc::new(coordinate_fan(2));
        let s = SupportVector::new(fan.clone(), vec![rat(-2), rat(-1), rat(-3), rat(-1)]).unwrap();
        for &m in &fan.maximal {
            let rep = verify_gamma_inversion(&s, m, &EqualityMode::Exact).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }
}
