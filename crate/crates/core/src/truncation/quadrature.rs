//! Numerical evaluation of `J_Σ(Δ) = ∫ k_Δ` region by region.
//!
//! Each region is split along the kinks of its integrand, every cell is
//! triangulated into pieces `v₀ + simplex + cone`, the simplex part is mapped
//! from the unit cube by the Duffy map and each cone direction by
//! `β = s/(1−s)`, and the result is integrated by tensor Gauss-Legendre
//! quadrature with order doubling. Dimensions `n ≥ 4` use a seeded Monte Carlo
//! estimate on the same pieces.

use super::convergence::certify;
use super::family::{k_delta, k_pair, KFamily};
use super::kexpr::KExpr;
use super::regions::{r_region, s_region};
use crate::error::{Error, Result};
use crate::geometry::hull::{triangulate_cone, vertices_and_rays};
use crate::geometry::{HalfSpaceRegion, Polytope};
use crate::linalg::{det, from_columns};
use crate::rational::{rat, sub, to_f64, vec_f64, Rat, Vector};
use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::num::NonZeroUsize;

/// A numerical value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Estimate {
        Estimate { value, error: 0.0 }
    }

    pub fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, error: self.error + o.error }
    }

    pub fn scale(self, c: f64) -> Estimate {
        Estimate { value: self.value * c, error: self.error * c.abs() }
    }
}

/// Quadrature parameters.
#[derive(Clone, Debug)]
pub struct QuadOptions {
    /// Relative tolerance on the total.
    pub tol: f64,
    pub min_order: usize,
    /// Maximal Gauss-Legendre order per axis (defaults depend on the dimension).
    pub max_order: Option<usize>,
    pub mc_max_samples: usize,
    pub seed: u64,
}

impl QuadOptions {
    pub fn new(tol: f64) -> QuadOptions {
        QuadOptions { tol, min_order: 4, max_order: None, mc_max_samples: 1 << 22, seed: 0x5eed }
    }

    fn max_order_for(&self, n: usize) -> usize {
        self.max_order.unwrap_or(match n {
            0 | 1 => 1024,
            2 => 256,
            _ => 64,
        })
    }
}

/// `v₀ + Σ t_k d_k + Σ β_j r_j` with `t` in the standard simplex, `β ≥ 0`.
#[derive(Clone, Debug)]
struct Piece {
    v0: Vec<f64>,
    sdirs: Vec<Vec<f64>>,
    rdirs: Vec<Vec<f64>>,
    jac: f64,
}

impl Piece {
    /// Image of `u ∈ (0,1)ⁿ` and the Jacobian of the map.
    fn map(&self, u: &[f64], x: &mut [f64]) -> f64 {
        x.copy_from_slice(&self.v0);
        let mut rem = 1.0;
        let mut jac = self.jac;
        let d = self.sdirs.len();
        for (k, dir) in self.sdirs.iter().enumerate() {
            let t = rem * u[k];
            jac *= rem;
            rem *= 1.0 - u[k];
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += t * di;
            }
        }
        for (j, dir) in self.rdirs.iter().enumerate() {
            let s = u[d + j];
            let om = 1.0 - s;
            let b = s / om;
            jac /= om * om;
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += b * di;
            }
        }
        jac
    }
}

/// Split a closed full-dimensional region along hyperplanes `a·x = c`,
/// keeping only splits that cut the interior.
pub fn split_cells(region: &HalfSpaceRegion, hps: &[(Vector, Rat)]) -> Vec<HalfSpaceRegion> {
    let mut cells = vec![region.closure()];
    for (a, c) in hps {
        let mut next = Vec::with_capacity(cells.len() + 1);
        for cell in cells {
            let lo = cell.clone().le(a.clone(), c.clone());
            let hi = cell.clone().ge(a.clone(), c.clone());
            if lo.interior_witness().is_some() && hi.interior_witness().is_some() {
                next.push(lo);
                next.push(hi);
            } else {
                next.push(cell);
            }
        }
        cells = next;
    }
    cells
}

fn pieces_of(cell: &HalfSpaceRegion) -> Result<Vec<Piece>> {
    let n = cell.dim;
    if cell.interior_witness().is_none() {
        return Ok(Vec::new());
    }
    let (verts, rays) = vertices_and_rays(cell)?;
    let nv = verts.len();
    let mut gens: Vec<Vector> = Vec::with_capacity(nv + rays.len());
    for v in &verts {
        let mut g = v.clone();
        g.push(rat(1));
        gens.push(g);
    }
    for r in &rays {
        let mut g = r.clone();
        g.push(rat(0));
        gens.push(g);
    }
    let mut out = Vec::new();
    for simplex in triangulate_cone(&gens, &|i| i < nv) {
        let vs: Vec<usize> = simplex.iter().copied().filter(|&i| i < nv).collect();
        let rs: Vec<usize> = simplex.iter().copied().filter(|&i| i >= nv).map(|i| i - nv).collect();
        let v0 = &verts[vs[0]];
        let mut cols: Vec<Vector> = vs[1..].iter().map(|&i| sub(&verts[i], v0)).collect();
        cols.extend(rs.iter().map(|&j| rays[j].clone()));
        let jac = to_f64(&det(&from_columns(&cols, n))).abs();
        if jac == 0.0 {
            continue;
        }
        out.push(Piece {
            v0: vec_f64(v0),
            sdirs: vs[1..].iter().map(|&i| vec_f64(&sub(&verts[i], v0))).collect(),
            rdirs: rs.iter().map(|&j| vec_f64(&rays[j])).collect(),
            jac,
        });
    }
    Ok(out)
}

fn gl_nodes(m: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(m).unwrap())
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| ((x + 1.0) / 2.0, w / 2.0))
        .collect()
}

fn gl_piece(p: &Piece, f: &dyn Fn(&[f64]) -> f64, nodes: &[(f64, f64)], n: usize) -> f64 {
    let m = nodes.len();
    let mut idx = vec![0usize; n];
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..n {
            u[k] = nodes[idx[k]].0;
            w *= nodes[idx[k]].1;
        }
        let jac = p.map(&u, &mut x);
        let v = f(&x);
        if v != 0.0 {
            sum += w * jac * v;
        }
        let mut k = 0;
        loop {
            if k == n {
                return sum;
            }
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn monte_carlo(pieces: &[Piece], f: &dyn Fn(&[f64]) -> f64, n: usize, opts: &QuadOptions) -> Result<Estimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut total_s1 = vec![0.0; pieces.len()];
    let mut total_s2 = vec![0.0; pieces.len()];
    let mut count = 0usize;
    let mut batch = 1usize << 12;
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    loop {
        for (i, p) in pieces.iter().enumerate() {
            for _ in 0..batch {
                for ui in u.iter_mut() {
                    *ui = rng.gen_range(f64::EPSILON..1.0 - f64::EPSILON);
                }
                let jac = p.map(&u, &mut x);
                let v = f(&x) * jac;
                total_s1[i] += v;
                total_s2[i] += v * v;
            }
        }
        count += batch;
        let cf = count as f64;
        let value: f64 = total_s1.iter().map(|s| s / cf).sum();
        let var: f64 = total_s1.iter().zip(&total_s2).map(|(s1, s2)| (s2 / cf - (s1 / cf).powi(2)).max(0.0) / cf).sum();
        let error = var.sqrt();
        if error <= opts.tol * value.abs().max(f64::MIN_POSITIVE) || error == 0.0 {
            return Ok(Estimate { value, error });
        }
        if count >= opts.mc_max_samples {
            return Err(Error::QuadratureStall { best: value, error });
        }
        batch = count;
    }
}

/// `∫_region f` over a closed, full-dimensional (possibly unbounded)
/// polyhedron, with `f` smooth away from the given hyperplanes.
pub fn integrate_region(
    f: &dyn Fn(&[f64]) -> f64,
    region: &HalfSpaceRegion,
    kinks: &[(Vector, Rat)],
    opts: &QuadOptions,
) -> Result<Estimate> {
    let n = region.dim;
    if n == 0 {
        return Ok(Estimate::exact(if region.witness().is_some() { f(&[]) } else { 0.0 }));
    }
    let mut pieces = Vec::new();
    for cell in split_cells(region, kinks) {
        pieces.extend(pieces_of(&cell)?);
    }
    if pieces.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    if n >= 4 {
        return monte_carlo(&pieces, f, n, opts);
    }
    let np = pieces.len() as f64;
    let mut m = opts.min_order.max(1);
    let nodes = gl_nodes(m);
    let mut vals: Vec<f64> = pieces.iter().map(|p| gl_piece(p, f, &nodes, n)).collect();
    let mut errs: Vec<f64> = vec![f64::INFINITY; pieces.len()];
    let mut done = vec![false; pieces.len()];
    let max_order = opts.max_order_for(n);
    loop {
        if m * 2 > max_order {
            let value: f64 = vals.iter().sum();
            let error: f64 = errs.iter().sum();
            return Err(Error::QuadratureStall { best: value, error });
        }
        m *= 2;
        let nodes = gl_nodes(m);
        let total: f64 = vals.iter().sum::<f64>().abs();
        for i in 0..pieces.len() {
            if done[i] {
                continue;
            }
            let v = gl_piece(&pieces[i], f, &nodes, n);
            let diff = (v - vals[i]).abs();
            vals[i] = v;
            errs[i] = diff;
            if diff <= opts.tol * total.max(v.abs()) / np || diff <= 1e-15 * v.abs() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            let value: f64 = vals.iter().sum();
            let error: f64 = errs.iter().sum();
            return Ok(Estimate { value, error });
        }
    }
}

fn kink_hyperplanes(k: &KExpr) -> Vec<(Vector, Rat)> {
    k.kinks().into_iter().map(|a| (a.coef, -a.constant)).collect()
}

fn integrate_kexpr(k: &KExpr, region: &HalfSpaceRegion, opts: &QuadOptions) -> Result<Estimate> {
    let f = |x: &[f64]| k.eval(x);
    integrate_region(&f, region, &kink_hyperplanes(k), opts)
}

/// Contribution of one pair `(σ₁, σ₂)` to `J`.
#[derive(Clone, Debug)]
pub struct PairIntegral {
    pub sigma1: usize,
    pub sigma2: usize,
    pub k: KExpr,
    pub estimate: Estimate,
}

/// Pairwise breakdown of `J_Σ(Δ)`.
#[derive(Clone, Debug)]
pub struct JReport {
    pub estimate: Estimate,
    pub pairs: Vec<PairIntegral>,
}

/// `J_Σ(Δ) = Σ_{σ₂⪯σ₁} ∫_{R^{σ₂}_{σ₁}} K_{σ₁,σ₂}`, requiring a certificate.
pub fn j_integral_report(kf: &KFamily, p: &Polytope, opts: &QuadOptions) -> Result<JReport> {
    super::convergence::check_convergence_hypotheses(kf, p)?.require()?;
    j_integral_unchecked(kf, p, opts)
}

/// The region-by-region sum without the certificate (the fan must still be
/// acute). The caller is responsible for convergence; used to evaluate
/// families the certificate rejects but whose integrals converge anyway.
pub fn j_integral_unchecked(kf: &KFamily, p: &Polytope, opts: &QuadOptions) -> Result<JReport> {
    let mut total = Estimate::exact(0.0);
    let mut pairs = Vec::new();
    for (s1, s2) in kf.fan.face_pairs() {
        let k = k_pair(kf, s1, s2)?;
        if k.is_zero() {
            continue;
        }
        let r = r_region(p, s1, s2)?;
        if r.empty {
            continue;
        }
        let e = integrate_kexpr(&k, &r.region, opts)?;
        total = total.add(e);
        pairs.push(PairIntegral { sigma1: s1, sigma2: s2, k, estimate: e });
    }
    Ok(JReport { estimate: total, pairs })
}

/// `J_Σ(Δ)` to relative tolerance `tol`.
pub fn j_integral(kf: &KFamily, p: &Polytope, tol: f64) -> Result<Estimate> {
    Ok(j_integral_report(kf, p, &QuadOptions::new(tol))?.estimate)
}

/// `J_Σ(0) = Σ_{σ₂⪯σ₁, dim σ₁ = n} ∫_{S^{σ₂}_{σ₁}} K_{σ₁,σ₂}`.
pub fn j_zero_with(kf: &KFamily, opts: &QuadOptions) -> Result<Estimate> {
    certify(kf).require()?;
    let fan = &kf.fan;
    let n = fan.dim();
    let mut total = Estimate::exact(0.0);
    for &s1 in &fan.maximal {
        if fan.cone_dim(s1) != n {
            continue;
        }
        for s2 in fan.faces_of(s1) {
            let k = k_pair(kf, s1, s2)?;
            if k.is_zero() {
                continue;
            }
            let s = s_region(fan, s1, s2)?;
            if s.empty {
                continue;
            }
            total = total.add(integrate_kexpr(&k, &s.region, opts)?);
        }
    }
    Ok(total)
}

pub fn j_zero(kf: &KFamily, tol: f64) -> Result<Estimate> {
    j_zero_with(kf, &QuadOptions::new(tol))
}

/// `∫_{[−r,r]ⁿ} |k_Δ|` (no certificate needed): the divergence probe.
pub fn abs_box_integral(kf: &KFamily, p: &Polytope, radius: &Rat, opts: &QuadOptions) -> Result<Estimate> {
    let k = k_delta(kf, p)?;
    let n = kf.fan.dim();
    let mut bx = HalfSpaceRegion::whole(n);
    for i in 0..n {
        let e = crate::rational::unit(n, i);
        bx = bx.le(e.clone(), radius.clone()).ge(e, -radius.clone());
    }
    let mut hps: Vec<(Vector, Rat)> = Vec::new();
    for t in &k.terms {
        hps.extend(t.region.hyperplanes());
        hps.extend(kink_hyperplanes(&t.k));
    }
    hps.sort();
    hps.dedup();
    let mut total = Estimate::exact(0.0);
    for cell in split_cells(&bx, &hps) {
        let Some(w) = cell.interior_witness() else { continue };
        let active: Vec<usize> = (0..k.terms.len()).filter(|&i| k.terms[i].region.contains(&w)).collect();
        if active.is_empty() {
            continue;
        }
        let f = |x: &[f64]| active.iter().map(|&i| k.terms[i].sign as f64 * k.terms[i].k.eval(x)).sum::<f64>().abs();
        let e = match integrate_region(&f, &cell, &[], opts) {
            Ok(e) => e,
            Err(Error::QuadratureStall { best, error }) => Estimate { value: best, error },
            Err(e) => return Err(e),
        };
        total = total.add(e);
    }
    Ok(total)
}

/// `∫ |k_Δ|` over `[−2^j, 2^j]ⁿ` for each `j` in `js`.
pub fn divergence_probe(kf: &KFamily, p: &Polytope, js: std::ops::RangeInclusive<u32>) -> Result<Vec<(f64, Estimate)>> {
    let mut opts = QuadOptions::new(1e-6);
    opts.max_order = Some(64);
    js.map(|j| {
        let r = Rat::from_integer(num_bigint::BigInt::from(1u64 << j));
        Ok(((1u64 << j) as f64, abs_box_integral(kf, p, &r, &opts)?))
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fan::examples::coordinate_fan;
    use crate::geometry::{realize_polytope, SupportVector};
    use crate::truncation::examples;
    use std::sync::Arc;

    #[test]
    fn integrates_simple_regions() {
        let opts = QuadOptions::new(1e-12);
        let q = HalfSpaceRegion::whole(2).ge(crate::rational::vec_i(&[1, 0]), rat(0)).ge(crate::rational::vec_i(&[0, 1]), rat(0));
        let f = |x: &[f64]| (-x[0] - x[1]).exp();
        let e = integrate_region(&f, &q, &[], &opts).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12, "{e:?}");
        let tri = q.clone().le(crate::rational::vec_i(&[1, 1]), rat(1));
        let g = |x: &[f64]| x[0] * x[0];
        let e = integrate_region(&g, &tri, &[], &opts).unwrap();
        assert!((e.value - 1.0 / 12.0).abs() < 1e-14);
        let line = HalfSpaceRegion::whole(1).ge(crate::rational::vec_i(&[1]), rat(-3));
        let h = |x: &[f64]| (-x[0].abs()).exp();
        let e = integrate_region(&h, &line, &[(crate::rational::vec_i(&[1]), rat(0))], &opts).unwrap();
        assert!((e.value - (2.0 - (-3f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn intro_example_value() {
        let kf = examples::intro_family();
        for (a, b) in [(-1i64, 2i64), (1, 3), (-2, -1)] {
            let s = SupportVector::new(kf.fan.clone(), vec![rat(-b), rat(a)]).unwrap();
            let p = realize_polytope(&s).unwrap();
            let j = j_integral(&kf, &p, 1e-12).unwrap();
            let expect = 2.0 + (b - a) as f64;
            assert!((j.value - expect).abs() < 1e-10 * expect, "[{a},{b}]: {j:?}");
        }
        assert!((j_zero(&kf, 1e-12).unwrap().value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_family_gives_volume() {
        let fan = Arc::new(coordinate_fan(2));
        let kf = KFamily::constant(fan.clone(), rat(1));
        let s = SupportVector::new(fan, vec![rat(-2), rat(-1), rat(-1), rat(0)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        let j = j_integral(&kf, &p, 1e-10).unwrap();
        assert!((j.value - to_f64(&p.volume())).abs() < 1e-12);
        assert_eq!(j_zero(&kf, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn uncertified_families_are_refused() {
        let kf = examples::exponential_family();
        let s = SupportVector::new(kf.fan.clone(), vec![rat(-1), rat(0)]).unwrap();
        let p = realize_polytope(&s).unwrap();
        assert!(matches!(j_integral(&kf, &p, 1e-8), Err(Error::NoCertificate(_))));
    }
}
