//! Families `(K_σ)` indexed by the cones of a fan, the truncated function
//! `k_Δ` and the pair functions `K_{σ₁,σ₂}`.

use super::kexpr::{parse_kexpr, Invariance, KExpr};
use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::geometry::{Direction, Fan, Polytope, QuotientFan, SupportVector};
use crate::rational::{sign_pow, vec_f64, Rat, Vector};
use std::sync::Arc;

/// A function `K_σ` for every cone of a fan.
#[derive(Clone, Debug)]
pub struct KFamily {
    pub fan: Arc<Fan>,
    /// Index-aligned with `fan.cones`.
    pub k: Vec<KExpr>,
}

impl KFamily {
    pub fn new(fan: Arc<Fan>, k: Vec<KExpr>) -> Result<KFamily> {
        if k.len() != fan.cones.len() {
            return Err(Error::DimensionMismatch { expected: fan.cones.len(), got: k.len() });
        }
        if let Some(e) = k.iter().find(|e| e.dim != fan.dim()) {
            return Err(Error::DimensionMismatch { expected: fan.dim(), got: e.dim });
        }
        Ok(KFamily { fan, k })
    }

    /// `K_σ ≡ c` for every cone.
    pub fn constant(fan: Arc<Fan>, c: Rat) -> KFamily {
        let n = fan.dim();
        let k = vec![KExpr::constant(n, c); fan.cones.len()];
        KFamily { fan, k }
    }

    /// Build from a closure over cone indices.
    pub fn from_fn(fan: Arc<Fan>, mut f: impl FnMut(usize) -> KExpr) -> Result<KFamily> {
        let k = (0..fan.cones.len()).map(&mut f).collect();
        KFamily::new(fan, k)
    }

    /// Parse a family from a default expression and per-cone overrides
    /// keyed by the (global) ray indices of the cone.
    pub fn parse(fan: Arc<Fan>, default: &str, overrides: &[(Vec<usize>, String)]) -> Result<KFamily> {
        let n = fan.dim();
        let base = parse_kexpr(default, n)?;
        let mut k = vec![base; fan.cones.len()];
        for (rays, text) in overrides {
            let c = fan.cone_index(rays).ok_or_else(|| Error::Expr(format!("no cone with rays {rays:?}")))?;
            k[c] = parse_kexpr(text, n)?;
        }
        KFamily::new(fan, k)
    }

    pub fn get(&self, sigma: usize) -> &KExpr {
        &self.k[sigma]
    }

    /// Every `K_σ` is a rational constant.
    pub fn constant_values(&self) -> Option<Vec<Rat>> {
        self.k.iter().map(|e| e.constant_value()).collect()
    }

    /// Invariance of every `K_σ` along `Span(σ)`.
    pub fn invariance_report(&self) -> Vec<(usize, Invariance)> {
        (0..self.fan.cones.len())
            .map(|c| {
                let rays: Vec<Vector> = self.fan.cones[c].rays.iter().map(|&r| self.fan.rays[r].clone()).collect();
                (c, self.k[c].invariance(&rays))
            })
            .collect()
    }

    /// The induced family on the quotient fan `Σ/τ`: `K̄_σ̄(y) = K_σ(U y)`
    /// with `U` the lattice basis of `τ^⊥` carried by the quotient fan.
    pub fn quotient(&self, tau: usize) -> Result<(QuotientFan, KFamily)> {
        let q = self.fan.quotient(tau)?;
        let n = self.fan.dim();
        let x0 = vec![Rat::from_integer(0.into()); n];
        let k = q.cone_map.iter().map(|&c| self.k[c].substitute(&x0, &q.basis)).collect();
        let fam = KFamily::new(Arc::new(q.fan.clone()), k)?;
        Ok((q, fam))
    }
}

/// One term `sign · K_σ · 1_{T⁻_{Δ,σ}}` of the truncated function.
#[derive(Clone, Debug)]
pub struct TruncationTerm {
    pub cone: usize,
    pub sign: i32,
    pub k: KExpr,
    pub region: crate::geometry::HalfSpaceRegion,
}

/// `k_Δ(x) = Σ_σ (−1)^{dim σ} K_σ(x) 1_{T⁻_{Δ,σ}}(x)`.
#[derive(Clone, Debug)]
pub struct TruncatedFunction {
    pub dim: usize,
    pub terms: Vec<TruncationTerm>,
}

impl TruncatedFunction {
    /// Exact region membership, floating evaluation of the K's.
    pub fn eval(&self, x: &[Rat]) -> f64 {
        let xf = vec_f64(x);
        self.terms.iter().filter(|t| t.region.contains(x)).map(|t| t.sign as f64 * t.k.eval(&xf)).sum()
    }

    /// Floating evaluation (membership in floating point too).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for t in &self.terms {
            let inside = t.region.constraints.iter().all(|c| {
                let v: f64 = c.normal.iter().zip(x).map(|(a, b)| crate::rational::to_f64(a) * b).sum::<f64>() - crate::rational::to_f64(&c.offset);
                if c.strict {
                    v > 0.0
                } else {
                    v >= 0.0
                }
            });
            if inside {
                s += t.sign as f64 * t.k.eval(x);
            }
        }
        s
    }

    /// The chain skeleton `Σ_σ (−1)^{dim σ} 1_{T⁻_{Δ,σ}}` (the `K ≡ 1` case).
    pub fn skeleton(&self) -> Chain {
        let mut c = Chain::zero(self.dim);
        for t in &self.terms {
            c.push(Rat::from_integer(t.sign.into()), t.region.clone());
        }
        c
    }
}

fn same_fan(a: &Arc<Fan>, b: &Arc<Fan>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The truncated function of a (possibly virtual) support vector.
pub fn k_delta_support(kf: &KFamily, s: &SupportVector) -> Result<TruncatedFunction> {
    if !same_fan(&kf.fan, &s.fan) {
        return Err(Error::FanMismatch);
    }
    let mut terms = Vec::new();
    for c in 0..kf.fan.cones.len() {
        terms.push(TruncationTerm {
            cone: c,
            sign: if kf.fan.cone_dim(c) % 2 == 0 { 1 } else { -1 },
            k: kf.k[c].clone(),
            region: s.tangent_cone(c, Direction::Outward)?,
        });
    }
    Ok(TruncatedFunction { dim: kf.fan.dim(), terms })
}

/// The truncated function `k_Δ` of a polytope.
pub fn k_delta(kf: &KFamily, p: &Polytope) -> Result<TruncatedFunction> {
    k_delta_support(kf, &p.support)
}

/// `K_{σ₁,σ₂} = Σ_{σ₂⪯τ⪯σ₁} (−1)^{dim τ} K_τ`, with symbolic cancellation.
pub fn k_pair(kf: &KFamily, sigma1: usize, sigma2: usize) -> Result<KExpr> {
    let f = &kf.fan;
    f.cone(sigma1)?;
    f.cone(sigma2)?;
    if !f.is_face(sigma2, sigma1) {
        return Err(Error::NotAFacePair);
    }
    let parts: Vec<(Rat, &KExpr)> = f
        .faces_of(sigma1)
        .into_iter()
        .filter(|&t| f.is_face(sigma2, t))
        .map(|t| (sign_pow(f.cone_dim(t)), &kf.k[t]))
        .collect();
    Ok(KExpr::linear_combination(f.dim(), &parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fan::examples::{coordinate_fan, line_fan};
    use crate::geometry::realize_polytope;
    use crate::rational::{rat, ratio};

    fn intro_family() -> KFamily {
        let fan = Arc::new(line_fan());
        KFamily::parse(fan, "1", &[(vec![], "1 + exp(-abs(x1))".into())]).unwrap()
    }

    #[test]
    fn one_dimensional_pieces() {
        let kf = intro_family();
        // Δ = [a, b] = [−1, 2]: a_0 = −b, a_1 = a.
        let s = SupportVector::new(kf.fan.clone(), vec![rat(-2), rat(-1)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        let k = k_delta(&kf, &p).unwrap();
        for x in [-3.0f64, -1.5, -0.5, 0.25, 1.0, 2.5, 4.0] {
            let xr = crate::rational::from_f64(x);
            let expect = if x < -1.0 || x > 2.0 { (-x.abs()).exp() } else { 1.0 + (-x.abs()).exp() };
            assert!((k.eval(&[xr]) - expect).abs() < 1e-15, "x = {x}");
        }
        // Endpoints belong to Δ.
        assert!((k.eval(&[rat(2)]) - (1.0 + (-2f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn constant_family_gives_indicator() {
        let fan = Arc::new(coordinate_fan(2));
        let kf = KFamily::constant(fan.clone(), rat(1));
        let s = SupportVector::new(fan, vec![rat(-1), rat(0), rat(-2), rat(1)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        let k = k_delta(&kf, &p).unwrap();
        let ind = Chain::indicator(p.region());
        let eq = crate::chains::chains_equal(&k.skeleton(), &ind, &crate::chains::EqualityMode::Exact).unwrap();
        assert!(eq.holds());
        assert_eq!(k.eval(&[ratio(1, 2), ratio(3, 2)]), 1.0);
        assert_eq!(k.eval(&[ratio(3, 2), ratio(3, 2)]), 0.0);
    }

    #[test]
    fn pair_functions() {
        let fan = Arc::new(line_fan());
        let ex = KFamily::parse(fan.clone(), "exp(x1)", &[]).unwrap();
        assert!(k_pair(&ex, fan.ray_cone(0), 0).unwrap().is_zero());
        let one = KFamily::constant(Arc::new(coordinate_fan(2)), rat(1));
        for (s1, s2) in one.fan.face_pairs() {
            assert_eq!(k_pair(&one, s1, s2).unwrap().is_zero(), s1 != s2);
        }
        let kf = intro_family();
        assert!(matches!(k_pair(&kf, 0, fan.ray_cone(0)), Err(Error::NotAFacePair)));
    }
}
