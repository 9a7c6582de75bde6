//! Polyhedral regions cut out by finitely many (strict or non-strict)
//! affine inequalities `normal · x ≥ offset` / `normal · x > offset`.
//!
//! Normals are plain covectors; any inner product has already been applied
//! by the caller. Strictness is tracked per constraint so that partitions are
//! genuinely disjoint.

use crate::lp::{Cmp, Lp, LpResult};
use crate::rational::{dot, fmt_rat, fmt_vec, is_zero_vec, neg, primitive_pair, Rat, Vector};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// One affine inequality `normal · x ≥ offset` (or `>` when `strict`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub normal: Vector,
    pub offset: Rat,
    pub strict: bool,
}

impl Constraint {
    pub fn new(normal: Vector, offset: Rat, strict: bool) -> Self {
        Constraint { normal, offset, strict }
    }

    /// Slack `normal · x − offset`.
    pub fn slack(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.offset
    }

    pub fn holds(&self, x: &[Rat]) -> bool {
        let s = self.slack(x);
        if self.strict {
            s.is_positive()
        } else {
            !s.is_negative()
        }
    }

    /// Same inequality with a primitive integer normal.
    pub fn normalized(&self) -> Constraint {
        if is_zero_vec(&self.normal) {
            return self.clone();
        }
        let (n, o) = primitive_pair(&self.normal, &self.offset);
        Constraint { normal: n, offset: o, strict: self.strict }
    }

    /// The complementary open/closed half-space.
    pub fn complement(&self) -> Constraint {
        Constraint { normal: neg(&self.normal), offset: -self.offset.clone(), strict: !self.strict }
    }
}

/// Intersection of finitely many half-spaces in `ℝ^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfSpaceRegion {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
}

impl HalfSpaceRegion {
    /// All of `ℝ^dim`.
    pub fn whole(dim: usize) -> Self {
        HalfSpaceRegion { dim, constraints: Vec::new() }
    }

    /// The empty set, encoded as `0 ≥ 1`.
    pub fn empty(dim: usize) -> Self {
        HalfSpaceRegion { dim, constraints: vec![Constraint::new(vec![Rat::zero(); dim], Rat::one(), false)] }
    }

    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Self {
        HalfSpaceRegion { dim, constraints }
    }

    pub fn push(&mut self, c: Constraint) {
        debug_assert_eq!(c.normal.len(), self.dim);
        self.constraints.push(c);
    }

    /// Add `normal · x ≥ offset`.
    pub fn ge(mut self, normal: Vector, offset: Rat) -> Self {
        self.push(Constraint::new(normal, offset, false));
        self
    }

    /// Add `normal · x > offset`.
    pub fn gt(mut self, normal: Vector, offset: Rat) -> Self {
        self.push(Constraint::new(normal, offset, true));
        self
    }

    /// Add `normal · x ≤ offset`.
    pub fn le(mut self, normal: Vector, offset: Rat) -> Self {
        self.push(Constraint::new(neg(&normal), -offset, false));
        self
    }

    /// Add `normal · x < offset`.
    pub fn lt(mut self, normal: Vector, offset: Rat) -> Self {
        self.push(Constraint::new(neg(&normal), -offset, true));
        self
    }

    /// Add `normal · x = offset` as two non-strict inequalities.
    pub fn eq(self, normal: Vector, offset: Rat) -> Self {
        self.ge(normal.clone(), offset.clone()).le(normal, offset)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.constraints.iter().all(|c| c.holds(x))
    }

    pub fn intersect(&self, other: &HalfSpaceRegion) -> HalfSpaceRegion {
        let mut c = self.constraints.clone();
        c.extend(other.constraints.iter().cloned());
        HalfSpaceRegion { dim: self.dim, constraints: c }
    }

    /// Closure: every constraint made non-strict.
    pub fn closure(&self) -> HalfSpaceRegion {
        HalfSpaceRegion {
            dim: self.dim,
            constraints: self.constraints.iter().map(|c| Constraint { strict: false, ..c.clone() }).collect(),
        }
    }

    /// Canonical form: primitive normals, duplicates merged (strict wins),
    /// trivially true constraints dropped.
    pub fn simplified(&self) -> HalfSpaceRegion {
        let mut out: Vec<Constraint> = Vec::new();
        for c in &self.constraints {
            if is_zero_vec(&c.normal) {
                let ok = if c.strict { c.offset.is_negative() } else { !c.offset.is_positive() };
                if ok {
                    continue;
                }
                return HalfSpaceRegion::empty(self.dim);
            }
            let c = c.normalized();
            if let Some(e) = out.iter_mut().find(|e| e.normal == c.normal) {
                if c.offset > e.offset || (c.offset == e.offset && c.strict) {
                    *e = c;
                }
            } else {
                out.push(c);
            }
        }
        out.sort();
        HalfSpaceRegion { dim: self.dim, constraints: out }
    }

    /// A point of the region (strict constraints hold strictly), or `None`.
    pub fn witness(&self) -> Option<Vector> {
        let n = self.dim;
        let has_strict = self.constraints.iter().any(|c| c.strict);
        let mut lp = Lp::new(n + 1);
        for c in &self.constraints {
            let mut row = c.normal.clone();
            row.push(if c.strict { -Rat::one() } else { Rat::zero() });
            lp.add(row, Cmp::Ge, c.offset.clone());
        }
        let mut cap = vec![Rat::zero(); n + 1];
        cap[n] = Rat::one();
        lp.add(cap.clone(), Cmp::Le, Rat::one());
        match lp.maximize(cap) {
            LpResult::Optimal { x, value } => {
                if has_strict && !value.is_positive() {
                    None
                } else {
                    Some(x[..n].to_vec())
                }
            }
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.witness().is_none()
    }

    /// A point satisfying every constraint strictly (an interior point of a
    /// full-dimensional region), or `None` if the region has empty interior.
    pub fn interior_witness(&self) -> Option<Vector> {
        let all_strict = HalfSpaceRegion {
            dim: self.dim,
            constraints: self.constraints.iter().map(|c| Constraint { strict: true, ..c.clone() }).collect(),
        };
        if all_strict.constraints.is_empty() {
            return Some(vec![Rat::zero(); self.dim]);
        }
        all_strict.witness()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.interior_witness().is_some()
    }

    /// Maximum of `objective · x` over the closure (None if empty, Err if unbounded).
    pub fn maximize(&self, objective: &[Rat]) -> Option<std::result::Result<(Rat, Vector), ()>> {
        let mut lp = Lp::new(self.dim);
        for c in &self.constraints {
            lp.add(c.normal.clone(), Cmp::Ge, c.offset.clone());
        }
        match lp.maximize(objective.to_vec()) {
            LpResult::Optimal { x, value } => Some(Ok((value, x))),
            LpResult::Unbounded => Some(Err(())),
            LpResult::Infeasible => None,
        }
    }

    /// Exact bounding box of the closure; `None` if empty or unbounded.
    pub fn bounding_box(&self) -> Option<(Vector, Vector)> {
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let e = crate::rational::unit(self.dim, i);
            let (mx, _) = self.maximize(&e)?.ok()?;
            let (mn, _) = self.maximize(&neg(&e))?.ok()?;
            hi.push(mx);
            lo.push(-mn);
        }
        Some((lo, hi))
    }

    /// True when the closure is bounded (an empty region counts as bounded).
    pub fn is_bounded(&self) -> bool {
        if self.closure().is_empty() {
            return true;
        }
        self.bounding_box().is_some()
    }

    /// Pull back along the affine map `t ↦ x0 + Σ t_i basis_i`.
    pub fn pullback(&self, x0: &[Rat], basis: &[Vector]) -> HalfSpaceRegion {
        let k = basis.len();
        let cons = self
            .constraints
            .iter()
            .map(|c| Constraint {
                normal: basis.iter().map(|b| dot(&c.normal, b)).collect(),
                offset: &c.offset - dot(&c.normal, x0),
                strict: c.strict,
            })
            .collect();
        HalfSpaceRegion { dim: k, constraints: cons }.simplified()
    }

    /// Image under `x ↦ x + v`.
    pub fn translate(&self, v: &[Rat]) -> HalfSpaceRegion {
        HalfSpaceRegion {
            dim: self.dim,
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint { normal: c.normal.clone(), offset: &c.offset + dot(&c.normal, v), strict: c.strict })
                .collect(),
        }
    }

    /// Image under `x ↦ −x`.
    pub fn reflect(&self) -> HalfSpaceRegion {
        HalfSpaceRegion {
            dim: self.dim,
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint { normal: neg(&c.normal), offset: c.offset.clone(), strict: c.strict })
                .collect(),
        }
    }

    /// Hyperplanes `normal · x = offset` bounding the region (normalized).
    pub fn hyperplanes(&self) -> Vec<(Vector, Rat)> {
        self.constraints
            .iter()
            .filter(|c| !is_zero_vec(&c.normal))
            .map(|c| primitive_pair(&c.normal, &c.offset))
            .collect()
    }
}

impl fmt::Display for HalfSpaceRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constraints.is_empty() {
            return write!(f, "R^{}", self.dim);
        }
        let parts: Vec<String> = self
            .constraints
            .iter()
            .map(|c| format!("{}·x {} {}", fmt_vec(&c.normal), if c.strict { ">" } else { ">=" }, fmt_rat(&c.offset)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
