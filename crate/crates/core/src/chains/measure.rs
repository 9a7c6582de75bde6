//! Exact integrals and lattice-point counts of chains with bounded support.

use super::arrangement::{all_faces, top_cells};
use super::Chain;
use crate::error::{Error, Result};
use crate::geometry::hull::region_volume;
use crate::rational::{ceil_i64, floor_i64, rat, Rat, Vector};
use num_traits::Zero;

/// `∫ c dx` (Lebesgue measure in the ambient coordinates). Every
/// top-dimensional cell of the common refinement carrying a nonzero value
/// must be bounded; otherwise [`Error::DivergentChain`].
pub fn integrate_chain(c: &Chain) -> Result<Rat> {
    if c.dim == 0 {
        return Ok(c.evaluate(&[]));
    }
    let hps = c.hyperplanes();
    let cap = super::arrangement::max_arrangement();
    if hps.len() > cap {
        return Err(Error::ArrangementTooLarge(hps.len(), cap));
    }
    let mut total = Rat::zero();
    for (cell, w) in top_cells(c.dim, &hps) {
        let v = c.evaluate(&w);
        if v.is_zero() {
            continue;
        }
        if !cell.is_bounded() {
            return Err(Error::DivergentChain);
        }
        total += v * region_volume(&cell.closure())?;
    }
    Ok(total)
}

/// `Σ_{m ∈ shift + ℤⁿ} c(m)`. The support of `c` must be bounded.
pub fn lattice_count_chain(c: &Chain, shift: &[Rat]) -> Result<Rat> {
    let n = c.dim;
    if shift.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: shift.len() });
    }
    let hps = c.hyperplanes();
    let mut lo: Option<Vector> = None;
    let mut hi: Option<Vector> = None;
    for f in all_faces(n, &hps)? {
        if c.evaluate(&f.witness).is_zero() {
            continue;
        }
        let (l, h) = f.region.bounding_box().ok_or(Error::DivergentChain)?;
        lo = Some(match lo {
            None => l,
            Some(o) => o.into_iter().zip(l).map(|(a, b)| a.min(b)).collect(),
        });
        hi = Some(match hi {
            None => h,
            Some(o) => o.into_iter().zip(h).map(|(a, b)| a.max(b)).collect(),
        });
    }
    let (Some(lo), Some(hi)) = (lo, hi) else { return Ok(Rat::zero()) };
    let ranges: Vec<(i64, i64)> = (0..n).map(|i| (ceil_i64(&(&lo[i] - &shift[i])), floor_i64(&(&hi[i] - &shift[i])))).collect();
    let mut total = Rat::zero();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return Ok(total);
    }
    loop {
        let x: Vector = idx.iter().zip(shift).map(|(&m, s)| rat(m) + s).collect();
        total += c.evaluate(&x);
        let mut k = 0;
        loop {
            if k == n {
                return Ok(total);
            }
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
            k += 1;
        }
    }
}
