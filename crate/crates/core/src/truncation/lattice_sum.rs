//! The discrete counterpart `Σ_{m ∈ shift + ℤⁿ} k_Δ(m)`, summed region by
//! region over the pairs `R^{σ₂}_{σ₁}`.

use super::convergence::check_convergence_hypotheses;
use super::family::{k_pair, KFamily};
use super::kexpr::KExpr;
use super::quadrature::Estimate;
use super::regions::r_region;
use crate::error::{Error, Result};
use crate::geometry::{HalfSpaceRegion, Polytope};
use crate::rational::{ceil_i64, dot, floor_i64, rat, to_f64, Rat};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Result of a lattice sum.
#[derive(Clone, Debug)]
pub struct LatticeSum {
    pub estimate: Estimate,
    /// The exact value, when every contributing `K_{σ₁,σ₂}` is constant.
    pub exact: Option<Rat>,
    /// Largest box radius used for unbounded regions (0 if none).
    pub radius: i64,
}

/// `a·m ≥ b` (or `>`) with integer data, for `m ∈ ℤⁿ`.
struct IntConstraint {
    a: Vec<i128>,
    b: i128,
    strict: bool,
}

impl IntConstraint {
    fn holds(&self, m: &[i64]) -> bool {
        let v: i128 = self.a.iter().zip(m).map(|(a, &x)| a * x as i128).sum();
        if self.strict {
            v > self.b
        } else {
            v >= self.b
        }
    }
}

fn to_i128(r: &Rat) -> Result<i128> {
    r.to_integer().to_i128().ok_or_else(|| Error::Expr("lattice data exceed 128-bit integers".into()))
}

/// Constraints of `{m ∈ ℤⁿ : m + shift ∈ region}`, cleared of denominators.
fn integer_constraints(region: &HalfSpaceRegion, shift: &[Rat]) -> Result<Vec<IntConstraint>> {
    region
        .constraints
        .iter()
        .map(|c| {
            let b = &c.offset - dot(&c.normal, shift);
            let mut l = b.denom().clone();
            for a in &c.normal {
                l = l.lcm(a.denom());
            }
            let lr = Rat::from_integer(l);
            Ok(IntConstraint {
                a: c.normal.iter().map(|a| to_i128(&(a * &lr))).collect::<Result<_>>()?,
                b: to_i128(&(&b * &lr))?,
                strict: c.strict,
            })
        })
        .collect()
}

/// Sum of `k` over the points of `shift + ℤⁿ` in `region ∩ [−r, r]ⁿ`
/// (`r = None` for a bounded region). Returns the float and point count.
fn box_sum(k: &KExpr, region: &HalfSpaceRegion, shift: &[Rat], r: Option<i64>) -> Result<(f64, u64)> {
    let n = region.dim;
    let mut clipped = region.closure();
    if let Some(r) = r {
        for i in 0..n {
            let e = crate::rational::unit(n, i);
            clipped = clipped.le(e.clone(), rat(r) + &shift[i]).ge(e, rat(-r) + &shift[i]);
        }
    }
    let Some((lo, hi)) = clipped.bounding_box() else { return Ok((0.0, 0)) };
    let ranges: Vec<(i64, i64)> = (0..n).map(|i| (ceil_i64(&(&lo[i] - &shift[i])), floor_i64(&(&hi[i] - &shift[i])))).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return Ok((0.0, 0));
    }
    let cons = integer_constraints(region, shift)?;
    let sf: Vec<f64> = shift.iter().map(to_f64).collect();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut x = vec![0.0; n];
    let mut sum = 0.0;
    let mut count = 0u64;
    loop {
        if cons.iter().all(|c| c.holds(&idx)) {
            for i in 0..n {
                x[i] = idx[i] as f64 + sf[i];
            }
            sum += k.eval(&x);
            count += 1;
        }
        let mut d = 0;
        loop {
            if d == n {
                return Ok((sum, count));
            }
            idx[d] += 1;
            if idx[d] <= ranges[d].1 {
                break;
            }
            idx[d] = ranges[d].0;
            d += 1;
        }
    }
}

fn max_radius(n: usize) -> i64 {
    match n {
        0 | 1 => 1 << 16,
        2 => 512,
        3 => 64,
        _ => 16,
    }
}

/// `Σ_{m ∈ shift + ℤⁿ} k_Δ(m)`, requiring a convergence certificate.
///
/// Bounded regions are summed exactly; unbounded ones on boxes of doubling
/// radius until the increment falls below `tol` (relative to the running
/// total, with an absolute floor of `tol`).
pub fn s_lattice_sum(kf: &KFamily, p: &Polytope, shift: &[Rat], tol: f64) -> Result<LatticeSum> {
    let n = kf.fan.dim();
    if shift.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: shift.len() });
    }
    check_convergence_hypotheses(kf, p)?.require()?;
    let mut pieces = Vec::new();
    for (s1, s2) in kf.fan.face_pairs() {
        let k = k_pair(kf, s1, s2)?;
        if k.is_zero() {
            continue;
        }
        let r = r_region(p, s1, s2)?;
        if r.empty {
            continue;
        }
        pieces.push((k, r.region));
    }
    let scale = p.region().bounding_box().map_or(0, |(lo, hi)| {
        lo.iter().chain(&hi).chain(shift).map(|v| v.abs().ceil().to_integer().to_i64().unwrap_or(i64::MAX / 4)).max().unwrap_or(0)
    });
    let np = pieces.len().max(1) as f64;
    let mut total = Estimate::exact(0.0);
    let mut exact = Some(Rat::zero());
    let mut radius = 0;
    for (k, region) in &pieces {
        if region.is_bounded() {
            let (s, count) = box_sum(k, region, shift, None)?;
            total = total.add(Estimate::exact(s));
            exact = match (exact, k.constant_value()) {
                (Some(e), Some(c)) => Some(e + c * rat(count as i64)),
                _ => None,
            };
            continue;
        }
        exact = None;
        let mut r = scale + 4;
        let (mut prev, _) = box_sum(k, region, shift, Some(r))?;
        let mut last_inc = f64::INFINITY;
        loop {
            if r * 2 > max_radius(n).max(2 * (scale + 4)) {
                return Err(Error::QuadratureStall { best: total.value + prev, error: last_inc });
            }
            r *= 2;
            let (cur, _) = box_sum(k, region, shift, Some(r))?;
            let inc = (cur - prev).abs();
            let prev_inc = last_inc;
            prev = cur;
            last_inc = inc;
            if inc <= tol * cur.abs().max(1.0) / np {
                // Geometric tail bound from the last two increments.
                let q = if prev_inc.is_finite() && prev_inc > 0.0 { inc / prev_inc } else { 0.0 };
                let err = if q < 1.0 { inc.max(inc * q / (1.0 - q)) } else { inc };
                total = total.add(Estimate { value: cur, error: err });
                break;
            }
        }
        radius = radius.max(r);
    }
    Ok(LatticeSum { estimate: total, exact, radius })
}

/// Exact lattice sum for families of rational constants (every surviving
/// region is then bounded under a certificate).
pub fn s_lattice_sum_exact(kf: &KFamily, p: &Polytope, shift: &[Rat]) -> Result<Rat> {
    if kf.constant_values().is_none() {
        return Err(Error::Expr("exact lattice sums need constant K".into()));
    }
    let s = s_lattice_sum(kf, p, shift, 0.0)?;
    s.exact.ok_or(Error::DivergentChain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::lattice_count_chain;
    use crate::geometry::fan::examples::coordinate_fan;
    use crate::geometry::{realize_polytope, SupportVector};
    use crate::rational::{ratio, zeros};
    use crate::truncation::examples;
    use std::sync::Arc;

    #[test]
    fn constant_family_counts_points() {
        let fan = Arc::new(coordinate_fan(2));
        let kf = KFamily::constant(fan.clone(), rat(1));
        let s = SupportVector::new(fan, vec![rat(-2), rat(-1), rat(-3), rat(1)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        let got = s_lattice_sum_exact(&kf, &p, &zeros(2)).unwrap();
        let want = lattice_count_chain(&crate::chains::Chain::indicator(p.region()), &zeros(2)).unwrap();
        assert_eq!(got, want);
        assert_eq!(got, rat(12));
        let half = [ratio(1, 2), rat(0)];
        assert_eq!(s_lattice_sum_exact(&kf, &p, &half).unwrap(), rat(9));
    }

    #[test]
    fn intro_family_sum() {
        let kf = examples::intro_family();
        let p = examples::interval(&kf.fan, rat(-1), rat(2));
        let s = s_lattice_sum(&kf, &p, &zeros(1), 1e-13).unwrap();
        // Σ_{m=-1..2} 1 + Σ_{m∈ℤ} e^{−|m|}.
        let e = (-1f64).exp();
        let want = 4.0 + (1.0 + e) / (1.0 - e);
        assert!((s.estimate.value - want).abs() < 1e-12, "{s:?}");
        assert!(s.exact.is_none());
    }
}
