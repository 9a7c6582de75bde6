//! Convergence certificates: acuteness, invariance of each `K_σ` along
//! `Span(σ)`, and exponential decay of every surviving `K_{σ₁,σ₂}` along the
//! cone `S^{σ₂}_{σ₁}`.

use super::family::{k_pair, KFamily};
use super::kexpr::{Decay, Invariance};
use super::regions::s_region_unchecked;
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::rational::fmt_vec;
use std::fmt;
use std::sync::Arc;

/// Overall outcome.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Certified,
    /// Hypotheses could not be checked within the grammar (polynomial
    /// decay, opaque factors, ...); convergence is then the caller's claim.
    Unverified(String),
    Failed(String),
}

/// Decay status of one pair `σ₂ ⪯ σ₁`.
#[derive(Clone, Debug)]
pub struct PairCheck {
    pub sigma1: usize,
    pub sigma2: usize,
    pub s_empty: bool,
    pub k_zero: bool,
    pub decay: Option<Decay>,
}

/// Outcome of [`check_convergence_hypotheses`].
#[derive(Clone, Debug)]
pub struct Certificate {
    pub acute_violation: Option<(usize, usize)>,
    pub invariance: Vec<(usize, Invariance)>,
    pub pairs: Vec<PairCheck>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// `Ok` when certified, `NoCertificate` otherwise.
    pub fn require(&self) -> Result<()> {
        match &self.verdict {
            Verdict::Certified => Ok(()),
            Verdict::Unverified(r) => Err(Error::NoCertificate(format!("unverified: {r}"))),
            Verdict::Failed(r) => Err(Error::NoCertificate(r.clone())),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certified => write!(f, "certified"),
            Verdict::Unverified(r) => write!(f, "unverified: {r}"),
            Verdict::Failed(r) => write!(f, "failed: {r}"),
        }
    }
}

/// Check the hypotheses of the convergence theorem for a family (they do
/// not depend on the polytope).
pub fn certify(kf: &KFamily) -> Certificate {
    let fan = &kf.fan;
    let acute_violation = fan.acute_violation();
    let invariance = kf.invariance_report();
    let mut pairs = Vec::new();
    let mut failure: Option<String> = None;
    let mut unverified: Option<String> = None;
    if let Some((i, j)) = acute_violation {
        failure = Some(format!("fan is not acute: rays {i} and {j} meet at an obtuse angle"));
    }
    for (c, inv) in &invariance {
        if let Invariance::Violated { point, direction } = inv {
            failure.get_or_insert_with(|| {
                format!("K of cone {c} = {} is not invariant along its span (x = {point:?}, y = {direction:?})", kf.k[*c])
            });
        }
    }
    for (s1, s2) in fan.face_pairs() {
        let kp = k_pair(kf, s1, s2).expect("face pair");
        let s = s_region_unchecked(fan, s1, s2).expect("face pair");
        let mut check = PairCheck { sigma1: s1, sigma2: s2, s_empty: s.empty, k_zero: kp.is_zero(), decay: None };
        if !s.empty && !kp.is_zero() {
            let d = kp.decay(&s.cone);
            match &d {
                Decay::Grows { direction } => {
                    failure.get_or_insert_with(|| {
                        format!("K_(cone {s1}, cone {s2}) = {kp} does not decay along {} in S", fmt_vec(direction))
                    });
                }
                Decay::Unverified(r) => {
                    unverified.get_or_insert_with(|| format!("pair (cone {s1}, cone {s2}): {r}"));
                }
                Decay::Decays { .. } => {}
            }
            check.decay = Some(d);
        }
        pairs.push(check);
    }
    let verdict = match (failure, unverified) {
        (Some(f), _) => Verdict::Failed(f),
        (None, Some(u)) => Verdict::Unverified(u),
        (None, None) => Verdict::Certified,
    };
    Certificate { acute_violation, invariance, pairs, verdict }
}

/// [`certify`], after checking that the family and polytope share a fan.
pub fn check_convergence_hypotheses(kf: &KFamily, p: &Polytope) -> Result<Certificate> {
    if !Arc::ptr_eq(&kf.fan, p.fan()) && *kf.fan != **p.fan() {
        return Err(Error::FanMismatch);
    }
    Ok(certify(kf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fan::examples::{coordinate_fan, line_fan, obtuse_fan};
    use crate::rational::rat;
    use crate::truncation::examples;

    #[test]
    fn shipped_families() {
        assert!(certify(&KFamily::constant(Arc::new(coordinate_fan(2)), rat(1))).certified());
        assert!(certify(&examples::intro_family()).certified());
        assert!(certify(&examples::rectangle_family()).certified());
        let ob = certify(&examples::obtuse_family());
        assert!(matches!(ob.verdict, Verdict::Failed(ref m) if m.contains("acute")));
        let ex = certify(&examples::exponential_family());
        assert!(matches!(ex.verdict, Verdict::Failed(ref m) if m.contains("invariant")));
        let _ = (line_fan(), obtuse_fan());
    }

    #[test]
    fn non_decaying_pair_is_named() {
        let fan = Arc::new(line_fan());
        let kf = KFamily::parse(fan, "1", &[(vec![], "2".into())]).unwrap();
        let c = certify(&kf);
        assert!(matches!(c.verdict, Verdict::Failed(ref m) if m.contains("does not decay")));
    }
}
