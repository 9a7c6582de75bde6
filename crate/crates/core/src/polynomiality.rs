//! Polynomiality of `J_Σ(Δ)` and `S_Σ(Δ)` in the support numbers of Δ.
//!
//! Two complementary checks: least-squares fits of sampled values by
//! polynomials in the support numbers, and the structural identity
//!
//! ```text
//! J_Σ(Δ) = Σ_τ J_{Σ/τ}(0) · vol(Γ_{Δ,τ})
//! ```
//!
//! (with `Γ_{Δ,τ}` measured in lattice coordinates of `Span(τ)` and `J_{Σ/τ}(0)`
//! in lattice coordinates of `τ^⊥`, so each term carries `|det[E_τ, U_τ]|`),
//! together with its discrete counterpart over cosets of `M₁ + M₂` in `M`.

use crate::chains::{gamma_chain, integrate_chain, lattice_count_chain, Chain};
use crate::error::{Error, Result};
use crate::geometry::{realize_polytope, HalfSpaceRegion, Polytope, SupportVector};
use crate::lattice::{coset_representatives, saturated_basis};
use crate::linalg::{det, from_columns, solve};
use crate::rational::{fmt_rat, rat, sign_pow, to_f64, zeros, Rat, Vector};
use crate::truncation::{j_integral, j_zero, Estimate, KFamily};
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use std::fmt;

fn pull_back(c: &Chain, x0: &[Rat], basis: &[Vector]) -> Chain {
    let mut out = Chain::zero(basis.len());
    for (coef, r) in &c.terms {
        out.push(coef.clone(), r.pullback(x0, basis));
    }
    out
}

/// `vol(Γ_{Δ,τ}) = ∫_{Span(τ)} γ_{Δ,τ}`, exact and signed, in the coordinates
/// of the saturated lattice basis of `Span(τ)`; `1` for `τ = {0}`.
pub fn vol_gamma(s: &SupportVector, tau: usize) -> Result<Rat> {
    let fan = &s.fan;
    let fc = fan.cone(tau)?;
    if fc.rays.is_empty() {
        return Ok(Rat::one());
    }
    let n = fan.dim();
    let rays: Vec<Vector> = fc.rays.iter().map(|&r| fan.rays[r].clone()).collect();
    let e = saturated_basis(&rays, n);
    integrate_chain(&pull_back(&gamma_chain(s, tau)?, &zeros(n), &e))
}

/// `|det[E_τ, U_τ]|`: the covolume of `(Span(τ)∩M) ⊕ (τ^⊥∩M)` in `M`.
pub fn splitting_index(kf: &KFamily, tau: usize) -> Result<(Vec<Vector>, Vec<Vector>, Rat)> {
    let fan = &kf.fan;
    let n = fan.dim();
    let rays: Vec<Vector> = fan.cone(tau)?.rays.iter().map(|&r| fan.rays[r].clone()).collect();
    let e = saturated_basis(&rays, n);
    let q = fan.quotient(tau)?;
    let mut cols = e.clone();
    cols.extend(q.basis.iter().cloned());
    let d = det(&from_columns(&cols, n)).abs();
    Ok((e, q.basis, d))
}

/// One `τ` term of the identity.
#[derive(Clone, Debug)]
pub struct IdentityTerm {
    pub tau: usize,
    pub index: Rat,
    pub j_zero: Estimate,
    pub vol_gamma: Rat,
}

/// Both sides of the polynomiality identity.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub terms: Vec<IdentityTerm>,
    pub discrepancy: f64,
}

impl IdentityReport {
    /// Relative discrepancy `|lhs − rhs| / max(1, |lhs|)`.
    pub fn relative(&self) -> f64 {
        self.discrepancy / self.lhs.value.abs().max(1.0)
    }
}

/// Compute `J_Σ(Δ)` directly and through `Σ_τ |det[E,U]| J_{Σ/τ}(0) vol(Γ_{Δ,τ})`.
pub fn polynomiality_identity_check(kf: &KFamily, p: &Polytope, tol: f64) -> Result<IdentityReport> {
    let lhs = j_integral(kf, p, tol)?;
    let mut rhs = Estimate::exact(0.0);
    let mut terms = Vec::new();
    for tau in 0..kf.fan.cones.len() {
        let vol = vol_gamma(&p.support, tau)?;
        let (_, _, index) = splitting_index(kf, tau)?;
        let (_, qf) = kf.quotient(tau)?;
        let jz = j_zero(&qf, tol)?;
        rhs = rhs.add(jz.scale(to_f64(&(&vol * &index))));
        terms.push(IdentityTerm { tau, index, j_zero: jz, vol_gamma: vol });
    }
    let discrepancy = (lhs.value - rhs.value).abs();
    Ok(IdentityReport { lhs, rhs, terms, discrepancy })
}

/// Outcome of [`discrete_identity_probe`].
#[derive(Clone, Debug)]
pub struct DiscreteIdentityReport {
    pub direct: Rat,
    pub via_cosets: Rat,
    /// `(τ, |M′|)` for every cone.
    pub cosets: Vec<(usize, usize)>,
}

impl DiscreteIdentityReport {
    pub fn agrees(&self) -> bool {
        self.direct == self.via_cosets
    }
}

/// The chain `Σ_{σ⪰τ} (−1)^{dim σ + dim τ} c_σ 1{⟨x, π_{τ^⊥} w_k⟩ ≥ 0, k ∈ σ∖τ}`
/// whose lattice sum in `τ^⊥` is `S_{Σ/τ}(0)`.
fn quotient_skeleton(kf: &KFamily, c: &[Rat], tau: usize) -> Result<Chain> {
    let fan = &kf.fan;
    let sp = &fan.space;
    let n = fan.dim();
    let trays: Vec<Vector> = fan.cones[tau].rays.iter().map(|&r| fan.rays[r].clone()).collect();
    let mut ch = Chain::zero(n);
    for s in fan.cofaces_of(tau) {
        let mut r = HalfSpaceRegion::whole(n);
        for &k in &fan.cones[s].rays {
            if fan.cones[tau].rays.contains(&k) {
                continue;
            }
            let p = sp.project_perp(&trays, &fan.rays[k]);
            r = r.ge(sp.covector(&p), Rat::zero());
        }
        ch.push(sign_pow(fan.cone_dim(s) + fan.cone_dim(tau)) * &c[s], r);
    }
    Ok(ch)
}

/// `S_Σ(Δ, M)` for a family of constants, directly and through the coset
/// decomposition `M = ⊔_{m′} (m′ + M₁ + M₂)` for every `τ`.
pub fn discrete_identity_probe(kf: &KFamily, p: &Polytope) -> Result<DiscreteIdentityReport> {
    let c = kf.constant_values().ok_or_else(|| Error::Expr("the discrete probe needs constant K".into()))?;
    let fan = &kf.fan;
    let n = fan.dim();
    let mut direct_chain = Chain::zero(n);
    for s in 0..fan.cones.len() {
        direct_chain.push(sign_pow(fan.cone_dim(s)) * &c[s], p.tangent_cone(s, crate::geometry::Direction::Outward)?);
    }
    let direct = lattice_count_chain(&direct_chain, &zeros(n))?;
    let mut total = Rat::zero();
    let mut cosets = Vec::new();
    for tau in 0..fan.cones.len() {
        let (e, u, _) = splitting_index(kf, tau)?;
        let mut basis = e.clone();
        basis.extend(u.iter().cloned());
        let reps = coset_representatives(&basis, n, 10_000)
            .map_err(|k| Error::CosetEnumerationTooLarge(format!("{k} cosets for cone {tau}")))?;
        let gamma = if e.is_empty() { Chain::constant(n, Rat::one()) } else { gamma_chain(&p.support, tau)? };
        let skel = quotient_skeleton(kf, &c, tau)?;
        for m in &reps {
            let a = lattice_count_chain(&pull_back(&gamma, m, &e), &zeros(e.len()))?;
            if a.is_zero() {
                continue;
            }
            let b = lattice_count_chain(&pull_back(&skel, m, &u), &zeros(u.len()))?;
            total += a * b;
        }
        cosets.push((tau, reps.len()));
    }
    Ok(DiscreteIdentityReport { direct, via_cosets: total, cosets })
}

/// Exponent vectors of all monomials of total degree `≤ d` in `k` variables,
/// ordered by degree then lexicographically.
pub fn monomials(k: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut cur = vec![0u32; k];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(cur.clone());
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
        }
        if k == 0 {
            if deg == 0 {
                out.push(Vec::new());
            }
            continue;
        }
        rec(0, deg as u32, &mut cur, &mut out);
    }
    out
}

fn mono_f64(e: &[u32], x: &[f64]) -> f64 {
    e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product()
}

fn mono_rat(e: &[u32], x: &[Rat]) -> Rat {
    let mut p = Rat::one();
    for (&k, v) in e.iter().zip(x) {
        for _ in 0..k {
            p *= v;
        }
    }
    p
}

fn fmt_mono(e: &[u32], names: &[String]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// A polynomial in the support numbers `a_ρ` (one variable per ray, or any
/// other parametrisation the caller fits against).
#[derive(Clone, Debug, PartialEq)]
pub struct SupportPolynomial {
    pub names: Vec<String>,
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl SupportPolynomial {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * mono_f64(e, x)).sum()
    }

    /// Coefficient of a monomial (0 if absent).
    pub fn coefficient(&self, e: &[u32]) -> f64 {
        self.terms.iter().find(|(m, _)| m.as_slice() == e).map_or(0.0, |(_, c)| *c)
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> SupportPolynomial {
        SupportPolynomial {
            names: self.names.clone(),
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() as usize == d).cloned().collect(),
        }
    }
}

impl fmt::Display for SupportPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c:+.6e}*{}", fmt_mono(e, &self.names))).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// An exactly fitted polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPolynomial {
    pub names: Vec<String>,
    pub terms: Vec<(Vec<u32>, Rat)>,
}

impl ExactPolynomial {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.terms.iter().fold(Rat::zero(), |s, (e, c)| s + c * mono_rat(e, x))
    }

    pub fn coefficient(&self, e: &[u32]) -> Rat {
        self.terms.iter().find(|(m, _)| m.as_slice() == e).map_or_else(Rat::zero, |(_, c)| c.clone())
    }
}

impl fmt::Display for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| format!("{}*{}", fmt_rat(c), fmt_mono(e, &self.names)))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Diagnostics of a least-squares fit.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub grid: String,
    pub degree: usize,
    pub samples: usize,
    pub holdout: usize,
    pub polynomial: SupportPolynomial,
    /// Max absolute residual on the fitting samples.
    pub fit_residual: f64,
    /// Max absolute residual on the held-out samples.
    pub holdout_residual: f64,
    /// Ratio of extreme singular values of the column-scaled design matrix.
    pub condition: f64,
}

/// Design matrices with a condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares fit of `(x, y)` samples by all monomials of degree `≤ degree`,
/// with column scaling and an SVD solve; residuals on `holdout` are reported.
pub fn fit_samples(
    names: &[String],
    samples: &[(Vec<f64>, f64)],
    holdout: &[(Vec<f64>, f64)],
    degree: usize,
    grid: &str,
) -> Result<FitReport> {
    let k = names.len();
    let monos = monomials(k, degree);
    let m = monos.len();
    if samples.len() < m {
        return Err(Error::InsufficientSamples { need: m, have: samples.len() });
    }
    let mut a = DMatrix::<f64>::zeros(samples.len(), m);
    for (i, (x, _)) in samples.iter().enumerate() {
        for (j, e) in monos.iter().enumerate() {
            a[(i, j)] = mono_f64(e, x);
        }
    }
    let scale: Vec<f64> = (0..m).map(|j| a.column(j).norm().max(f64::MIN_POSITIVE)).collect();
    for j in 0..m {
        let s = scale[j];
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|(_, v)| *v));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(format!(
            "condition number {condition:.3e} for {m} monomials of degree ≤ {degree} on {} samples",
            samples.len()
        )));
    }
    let c = svd.solve(&y, smax * 1e-14).map_err(|e| Error::IllConditioned(e.to_string()))?;
    let terms: Vec<(Vec<u32>, f64)> = monos.iter().cloned().zip((0..m).map(|j| c[j] / scale[j])).collect();
    let polynomial = SupportPolynomial { names: names.to_vec(), terms };
    let resid = |set: &[(Vec<f64>, f64)]| set.iter().map(|(x, v)| (polynomial.eval(x) - v).abs()).fold(0.0, f64::max);
    Ok(FitReport {
        grid: grid.into(),
        degree,
        samples: samples.len(),
        holdout: holdout.len(),
        fit_residual: resid(samples),
        holdout_residual: resid(holdout),
        condition,
        polynomial,
    })
}

/// Variable names `a0, a1, …` for the support numbers of a fan.
pub fn support_names(num_rays: usize) -> Vec<String> {
    (0..num_rays).map(|i| format!("a{i}")).collect()
}

/// Fit `evaluator(Δ)` as a polynomial in the support numbers over `grid`,
/// reporting the residual on `holdout`.
pub fn fit_polynomial(
    evaluator: &dyn Fn(&Polytope) -> Result<f64>,
    grid: &[Polytope],
    holdout: &[Polytope],
    degree: usize,
) -> Result<FitReport> {
    let Some(first) = grid.first() else { return Err(Error::InsufficientSamples { need: 1, have: 0 }) };
    let names = support_names(first.fan().num_rays());
    let sample = |ps: &[Polytope]| -> Result<Vec<(Vec<f64>, f64)>> {
        ps.iter().map(|p| Ok((p.support.a.iter().map(to_f64).collect(), evaluator(p)?))).collect()
    };
    let s = sample(grid)?;
    let h = sample(holdout)?;
    fit_samples(&names, &s, &h, degree, &format!("{} support vectors ({} held out)", grid.len(), holdout.len()))
}

/// Exact least-squares fit (normal equations over ℚ); also returns the
/// maximal absolute residual, which is `0` for exactly polynomial data.
pub fn fit_polynomial_exact(names: &[String], samples: &[(Vec<Rat>, Rat)], degree: usize) -> Result<(ExactPolynomial, Rat)> {
    let monos = monomials(names.len(), degree);
    let m = monos.len();
    if samples.len() < m {
        return Err(Error::InsufficientSamples { need: m, have: samples.len() });
    }
    let rows: Vec<Vec<Rat>> = samples.iter().map(|(x, _)| monos.iter().map(|e| mono_rat(e, x)).collect()).collect();
    let mut ata = vec![vec![Rat::zero(); m]; m];
    let mut aty = vec![Rat::zero(); m];
    for (row, (_, y)) in rows.iter().zip(samples) {
        for i in 0..m {
            aty[i] += &row[i] * y;
            for j in 0..m {
                ata[i][j] += &row[i] * &row[j];
            }
        }
    }
    let c = solve(&ata, &aty).ok_or_else(|| Error::IllConditioned("singular normal equations".into()))?;
    let poly = ExactPolynomial { names: names.to_vec(), terms: monos.into_iter().zip(c).collect() };
    let resid = samples.iter().map(|(x, y)| (poly.eval(x) - y).abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a });
    Ok((poly, resid))
}

/// Feasible polytopes `a = base + Σ_i t_i e_i` over the tensor grid of
/// `offsets` in every support number (infeasible combinations are skipped).
pub fn support_grid(base: &SupportVector, offsets: &[Rat]) -> Vec<Polytope> {
    let k = base.a.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    if offsets.is_empty() {
        return out;
    }
    loop {
        let a: Vec<Rat> = (0..k).map(|i| &base.a[i] + &offsets[idx[i]]).collect();
        if let Ok(s) = SupportVector::new(base.fan.clone(), a) {
            if let Ok(p) = realize_polytope(&s) {
                out.push(p);
            }
        }
        let mut d = 0;
        loop {
            if d == k {
                return out;
            }
            idx[d] += 1;
            if idx[d] < offsets.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Dilations `t·Δ` for `t = 1, …, count`, as `(t, polytope)`.
pub fn dilations(p: &Polytope, count: i64) -> Result<Vec<(Rat, Polytope)>> {
    (1..=count).map(|t| Ok((rat(t), realize_polytope(&p.support.scale(&rat(t)))?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fan::examples::{a2_fan, coordinate_fan, diagonal_ray_fan, line_fan};
    use crate::rational::ratio;
    use crate::truncation::{examples, s_lattice_sum_exact};
    use std::sync::Arc;

    #[test]
    fn vol_gamma_on_the_line() {
        // Δ = [−1, 3].
        let fan = Arc::new(line_fan());
        let s = SupportVector::new(fan.clone(), vec![rat(-3), rat(-1)]).unwrap();
        assert_eq!(vol_gamma(&s, 0).unwrap(), rat(1));
        assert_eq!(vol_gamma(&s, fan.ray_cone(0)).unwrap(), rat(3));
        assert_eq!(vol_gamma(&s, fan.ray_cone(1)).unwrap(), rat(1));
    }

    #[test]
    fn vol_gamma_is_homogeneous() {
        let fan = Arc::new(a2_fan());
        let s = SupportVector::new(fan.clone(), vec![rat(-2), rat(-1), rat(-3), rat(-2), rat(-1), rat(-2)]).unwrap();
        let t = ratio(5, 3);
        let st = s.scale(&t);
        for tau in 0..fan.cones.len() {
            let d = fan.cone_dim(tau) as i32;
            let v = vol_gamma(&s, tau).unwrap();
            assert_eq!(vol_gamma(&st, tau).unwrap(), v * t.pow(d));
        }
    }

    #[test]
    fn identity_in_one_dimension() {
        let kf = examples::intro_family();
        let p = examples::interval(&kf.fan, rat(-1), rat(2));
        let r = polynomiality_identity_check(&kf, &p, 1e-10).unwrap();
        assert!(r.discrepancy < 1e-8, "{r:?}");
        assert!((r.lhs.value - 5.0).abs() < 1e-8);
    }

    #[test]
    fn identity_for_constant_family_is_the_volume() {
        let kf = examples::hexagon_constant();
        let s = SupportVector::new(kf.fan.clone(), vec![rat(-2); 6]).unwrap();
        let p = realize_polytope(&s).unwrap();
        let r = polynomiality_identity_check(&kf, &p, 1e-10).unwrap();
        let vol = to_f64(&p.volume());
        assert!((r.lhs.value - vol).abs() < 1e-9 && (r.rhs.value - vol).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn exact_fit_of_the_square_ehrhart_polynomial() {
        let fan = Arc::new(coordinate_fan(2));
        let kf = KFamily::constant(fan.clone(), rat(1));
        let unit = realize_polytope(&SupportVector::new(fan, vec![rat(-1), rat(0), rat(-1), rat(0)]).unwrap()).unwrap();
        let samples: Vec<(Vec<Rat>, Rat)> = dilations(&unit, 6)
            .unwrap()
            .into_iter()
            .map(|(t, p)| (vec![t], s_lattice_sum_exact(&kf, &p, &zeros(2)).unwrap()))
            .collect();
        let (poly, resid) = fit_polynomial_exact(&["t".into()], &samples, 2).unwrap();
        assert!(resid.is_zero());
        assert_eq!(poly.coefficient(&[2]), rat(1));
        assert_eq!(poly.coefficient(&[1]), rat(2));
        assert_eq!(poly.coefficient(&[0]), rat(1));
    }

    #[test]
    fn float_fit_recovers_length() {
        let kf = KFamily::constant(Arc::new(line_fan()), rat(1));
        let base = SupportVector::new(kf.fan.clone(), vec![rat(-1), rat(-1)]).unwrap();
        let offs: Vec<Rat> = (0..4).map(|i| ratio(i, 2)).collect();
        let grid = support_grid(&base, &offs);
        let hold = support_grid(&base, &[ratio(1, 3), ratio(7, 5)]);
        let eval = |p: &Polytope| j_integral(&kf, p, 1e-12).map(|e| e.value);
        let r = fit_polynomial(&eval, &grid, &hold, 1).unwrap();
        // b − a = −a0 − a1.
        assert!((r.polynomial.coefficient(&[1, 0]) + 1.0).abs() < 1e-10);
        assert!((r.polynomial.coefficient(&[0, 1]) + 1.0).abs() < 1e-10);
        assert!(r.holdout_residual < 1e-10);
        assert!(matches!(fit_polynomial(&eval, &grid[..2], &hold, 1), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn discrete_probe_on_fans() {
        for (fan, a) in [(coordinate_fan(2), vec![-1, -2, -1, -2]), (diagonal_ray_fan(), vec![-2, -3, -2, 0, 0])] {
            let fan = Arc::new(fan);
            let kf = KFamily::constant(fan.clone(), rat(1));
            let a: Vec<Rat> = a.into_iter().map(rat).collect();
            let p = realize_polytope(&SupportVector::new(fan.clone(), a).unwrap()).unwrap();
            let r = discrete_identity_probe(&kf, &p).unwrap();
            assert!(r.agrees(), "{r:?}");
            let max = r.cosets.iter().map(|c| c.1).max().unwrap();
            assert_eq!(max, if fan.num_rays() == 5 { 2 } else { 1 });
        }
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(4, 2).len(), 15);
        assert_eq!(monomials(2, 6).len(), 28);
        assert_eq!(monomials(0, 3).len(), 1);
    }
}
