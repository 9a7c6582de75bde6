//! Polyhedral chains: finite rational combinations of indicator functions of
//! (possibly unbounded, possibly non-closed) convex polyhedra, together with
//! exact equality, convolution and the classical decompositions.

pub mod arrangement;
pub mod convolution;
pub mod decompositions;
pub mod measure;

pub use arrangement::{max_arrangement, Face, Hyperplane};
pub use convolution::{convolve, polytope_inverse_chain, virtual_characteristic, VirtualPolytopePair};
pub use decompositions::{brianchon_gram, gamma_chain, lawrence_varchenko};
pub use measure::{integrate_chain, lattice_count_chain};

use crate::error::Result;
use crate::geometry::region::HalfSpaceRegion;
use crate::rational::{Rat, Vector};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// A finite sum `Σ λ_i 1_{R_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub dim: usize,
    pub terms: Vec<(Rat, HalfSpaceRegion)>,
}

impl Chain {
    pub fn zero(dim: usize) -> Chain {
        Chain { dim, terms: Vec::new() }
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: Rat) -> Chain {
        Chain { dim, terms: vec![(c, HalfSpaceRegion::whole(dim))] }.normalized()
    }

    pub fn indicator(region: HalfSpaceRegion) -> Chain {
        Chain { dim: region.dim, terms: vec![(Rat::one(), region)] }
    }

    pub fn term(coef: Rat, region: HalfSpaceRegion) -> Chain {
        Chain { dim: region.dim, terms: vec![(coef, region)] }.normalized()
    }

    /// Append `coef · 1_region`.
    pub fn push(&mut self, coef: Rat, region: HalfSpaceRegion) {
        if !coef.is_zero() {
            self.terms.push((coef, region));
        }
    }

    /// Value at a point.
    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (c, r) in &self.terms {
            if r.contains(x) {
                s += c;
            }
        }
        s
    }

    /// Value at a floating-point location (regions tested in floating point).
    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (c, r) in &self.terms {
            let inside = r.constraints.iter().all(|k| {
                let v: f64 = k.normal.iter().zip(x).map(|(a, b)| crate::rational::to_f64(a) * b).sum::<f64>()
                    - crate::rational::to_f64(&k.offset);
                if k.strict { v > 0.0 } else { v >= 0.0 }
            });
            if inside {
                s += crate::rational::to_f64(c);
            }
        }
        s
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Chain { dim: self.dim, terms }.normalized()
    }

    pub fn scale(&self, c: &Rat) -> Chain {
        if c.is_zero() {
            return Chain::zero(self.dim);
        }
        Chain { dim: self.dim, terms: self.terms.iter().map(|(k, r)| (k * c, r.clone())).collect() }
    }

    pub fn neg(&self) -> Chain {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.neg())
    }

    /// Pointwise product: `1_R · 1_S = 1_{R ∩ S}`.
    pub fn mul(&self, other: &Chain) -> Chain {
        let mut out = Chain::zero(self.dim);
        for (a, r) in &self.terms {
            for (b, s) in &other.terms {
                out.push(a * b, r.intersect(s));
            }
        }
        out.normalized()
    }

    /// Image under `x ↦ x + v`.
    pub fn translate(&self, v: &[Rat]) -> Chain {
        Chain { dim: self.dim, terms: self.terms.iter().map(|(c, r)| (c.clone(), r.translate(v))).collect() }
    }

    /// Merge terms with identical simplified regions and drop zero or empty terms.
    pub fn normalized(&self) -> Chain {
        let mut out: Vec<(Rat, HalfSpaceRegion)> = Vec::new();
        for (c, r) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let r = r.simplified();
            if let Some(e) = out.iter_mut().find(|e| e.1 == r) {
                e.0 += c;
            } else {
                out.push((c.clone(), r));
            }
        }
        out.retain(|(c, r)| !c.is_zero() && !r.constraints.iter().any(|k| crate::rational::is_zero_vec(&k.normal)));
        Chain { dim: self.dim, terms: out }
    }

    /// Drop terms whose region is empty (an LP per term).
    pub fn pruned(&self) -> Chain {
        let mut c = self.normalized();
        c.terms.retain(|(_, r)| !r.is_empty());
        c
    }

    /// Canonical hyperplanes of every term.
    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        arrangement::canonical(self.terms.iter().flat_map(|(_, r)| r.hyperplanes()))
    }

    /// Every face of the common refinement of the terms, with the chain's value on it.
    pub fn faces_with_values(&self) -> Result<Vec<(Face, Rat)>> {
        let hps = self.hyperplanes();
        Ok(arrangement::all_faces(self.dim, &hps)?.into_iter().map(|f| {
            let v = self.evaluate(&f.witness);
            (f, v)
        }).collect())
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(c, r)| format!("({})·1{}", crate::rational::fmt_rat(c), r)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A chain with floating-point copies of its constraints. Evaluation uses
/// them when the slack is clearly nonzero and falls back to exact arithmetic
/// near a boundary, so results are exact.
pub struct FastChain<'a> {
    chain: &'a Chain,
    approx: Vec<Vec<(Vec<f64>, f64, f64)>>,
}

impl<'a> FastChain<'a> {
    pub fn new(chain: &'a Chain) -> Self {
        let approx = chain
            .terms
            .iter()
            .map(|(_, r)| {
                r.constraints
                    .iter()
                    .map(|k| {
                        let n = crate::rational::vec_f64(&k.normal);
                        let o = crate::rational::to_f64(&k.offset);
                        let scale = n.iter().map(|v| v.abs()).sum::<f64>() + o.abs();
                        (n, o, scale)
                    })
                    .collect()
            })
            .collect();
        FastChain { chain, approx }
    }

    pub fn evaluate(&self, x: &[Rat], xf: &[f64]) -> Rat {
        let mut s = Rat::zero();
        let xmax = xf.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for ((c, r), ap) in self.chain.terms.iter().zip(&self.approx) {
            let inside = r.constraints.iter().zip(ap).all(|(k, (n, o, scale))| {
                let v: f64 = n.iter().zip(xf).map(|(a, b)| a * b).sum::<f64>() - o;
                if v.abs() > 1e-9 * scale * xmax {
                    v > 0.0
                } else {
                    k.holds(x)
                }
            });
            if inside {
                s += c;
            }
        }
        s
    }
}

/// How [`chains_equal`] decides.
#[derive(Clone, Debug)]
pub enum EqualityMode {
    /// Test one witness in every face of the common arrangement.
    Exact,
    /// Test random rational points in the box `[-radius, radius]ⁿ`.
    Sampled { samples: usize, seed: u64, radius: i64 },
}

impl EqualityMode {
    /// The default sampled mode: `10⁴` points with a fixed seed.
    pub fn sampled() -> EqualityMode {
        EqualityMode::Sampled { samples: 10_000, seed: 0x5eed, radius: 16 }
    }
}

/// Outcome of an equality test.
#[derive(Clone, Debug, PartialEq)]
pub enum Equality {
    Equal,
    /// A point where the two chains differ, with both values.
    Counterexample { point: Vector, left: Rat, right: Rat },
}

impl Equality {
    pub fn holds(&self) -> bool {
        matches!(self, Equality::Equal)
    }
}

/// Decide pointwise equality of two chains.
pub fn chains_equal(c1: &Chain, c2: &Chain, mode: &EqualityMode) -> Result<Equality> {
    let diff = c1.sub(c2);
    let check = |x: &Vector| -> Option<Equality> {
        if diff.evaluate(x).is_zero() {
            None
        } else {
            Some(Equality::Counterexample { point: x.clone(), left: c1.evaluate(x), right: c2.evaluate(x) })
        }
    };
    match mode {
        EqualityMode::Exact => {
            let hps = diff.hyperplanes();
            for f in arrangement::all_faces(diff.dim, &hps)? {
                if let Some(e) = check(&f.witness) {
                    return Ok(e);
                }
            }
            Ok(Equality::Equal)
        }
        EqualityMode::Sampled { samples, seed, radius } => {
            let fast = FastChain::new(&diff);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*samples {
                let num: Vec<i64> = (0..diff.dim).map(|_| rng.gen_range(-radius * 1009..=radius * 1009)).collect();
                let x: Vector = num.iter().map(|&k| crate::rational::ratio(k, 1009)).collect();
                let xf: Vec<f64> = num.iter().map(|&k| k as f64 / 1009.0).collect();
                if !fast.evaluate(&x, &xf).is_zero() {
                    if let Some(e) = check(&x) {
                        return Ok(e);
                    }
                }
            }
            Ok(Equality::Equal)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, vec_i};

    fn interval(lo: i64, hi: i64, open: bool) -> HalfSpaceRegion {
        let r = HalfSpaceRegion::whole(1);
        if open {
            r.gt(vec_i(&[1]), rat(lo)).lt(vec_i(&[1]), rat(hi))
        } else {
            r.ge(vec_i(&[1]), rat(lo)).le(vec_i(&[1]), rat(hi))
        }
    }

    #[test]
    fn closed_minus_open_is_endpoints() {
        let c = Chain::indicator(interval(0, 1, false)).sub(&Chain::indicator(interval(0, 1, true)));
        let pts = Chain::indicator(HalfSpaceRegion::whole(1).eq(vec_i(&[1]), rat(0)))
            .add(&Chain::indicator(HalfSpaceRegion::whole(1).eq(vec_i(&[1]), rat(1))));
        assert!(chains_equal(&c, &pts, &EqualityMode::Exact).unwrap().holds());
        let one_pt = Chain::indicator(HalfSpaceRegion::whole(1).eq(vec_i(&[1]), rat(0)));
        assert!(!chains_equal(&c, &one_pt, &EqualityMode::Exact).unwrap().holds());
    }

    #[test]
    fn half_lines_sum_to_constant() {
        let a = HalfSpaceRegion::whole(2).ge(vec_i(&[1, 1]), rat(0));
        let b = HalfSpaceRegion::whole(2).lt(vec_i(&[1, 1]), rat(0));
        let c = Chain::indicator(a).add(&Chain::indicator(b));
        assert!(chains_equal(&c, &Chain::constant(2, rat(1)), &EqualityMode::Exact).unwrap().holds());
        assert!(chains_equal(&c, &Chain::constant(2, rat(1)), &EqualityMode::sampled()).unwrap().holds());
    }

    #[test]
    fn product_is_intersection() {
        let a = Chain::indicator(interval(0, 2, false));
        let b = Chain::indicator(interval(1, 3, false));
        assert!(chains_equal(&a.mul(&b), &Chain::indicator(interval(1, 2, false)), &EqualityMode::Exact).unwrap().holds());
    }
}
