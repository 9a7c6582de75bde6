//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p polytrunc-core --test acceptance`. The process
//! exits non-zero if any criterion fails.

use polytrunc_core::chains::{
    brianchon_gram, chains_equal, lattice_count_chain, lawrence_varchenko, virtual_characteristic, Chain, EqualityMode,
    VirtualPolytopePair,
};
use polytrunc_core::geometry::random::{integer_direction, simple_polytope, simplicial_cone};
use polytrunc_core::geometry::{realize_polytope, Direction, Fan, Polytope, Space, SupportVector};
use polytrunc_core::incidence::verify_langlands;
use polytrunc_core::polynomiality::{
    discrete_identity_probe, dilations, fit_polynomial, fit_polynomial_exact, fit_samples, polynomiality_identity_check,
};
use polytrunc_core::rational::{rat, ratio, to_f64, vec_i, zeros, Rat, Vector};
use polytrunc_core::truncation::{
    certify, divergence_probe, examples, j_integral, j_integral_unchecked, s_lattice_sum_exact, verify_double_partition,
    KFamily, QuadOptions, Verdict,
};
use polytrunc_core::{Error, Result};
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

/// Relative error for the 1-D interval example.
const INTRO_REL: f64 = 1e-8;
const INTRO_SECONDS: f64 = 5.0;
/// Relative error for the rectangle closed form.
const RECT_REL: f64 = 1e-6;
/// Absolute error on fitted rectangle coefficients.
const RECT_COEF_ABS: f64 = 1e-4;
const BG_SECONDS: f64 = 60.0;
const LANGLANDS_SAMPLES: usize = 10_000;
const PARTITION_SAMPLES: usize = 1_000;
/// Discrepancy bound for the polynomiality identity.
const IDENTITY_TOL: f64 = 1e-5;
/// Minimal residual of polynomial fits to `e^b − e^a`.
const EXP_RESIDUAL_MIN: f64 = 1e-2;

type Outcome = Result<(bool, String)>;

fn line_polytope(kf: &KFamily, a: i64, b: i64) -> Polytope {
    examples::interval(&kf.fan, rat(a), rat(b))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let kf = examples::intro_family();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for a in -2..=2 {
        for b in 0..=4 {
            if a >= b {
                continue;
            }
            let j = j_integral(&kf, &line_polytope(&kf, a, b), 1e-12)?;
            let expect = 2.0 - a as f64 + b as f64;
            worst = worst.max((j.value - expect).abs() / expect.abs());
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst < INTRO_REL && secs < INTRO_SECONDS, format!("{cases} intervals, max rel err {worst:.2e}, {secs:.2}s")))
}

fn criterion_2() -> Outcome {
    let kf = examples::rectangle_family();
    let vals = [ratio(1, 2), rat(1), rat(2)];
    let mut polys = Vec::new();
    for t1 in &vals {
        for t1p in &vals {
            for t2 in &vals {
                for t2p in &vals {
                    polys.push(examples::rectangle(&kf.fan, t1.clone(), t1p.clone(), t2.clone(), t2p.clone()));
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for p in &polys {
        let j = j_integral(&kf, p, 1e-10)?.value;
        let t: Vec<f64> = p.support.a.iter().map(|v| -to_f64(v)).collect();
        let expect = examples::rectangle_closed_form(t[0], t[1], t[2], t[3]);
        worst = worst.max((j - expect).abs() / expect);
    }
    let hold: Vec<Polytope> = [(ratio(3, 4), ratio(5, 3), ratio(7, 5), ratio(2, 3)), (ratio(3, 2), ratio(1, 3), ratio(5, 2), ratio(6, 5))]
        .into_iter()
        .map(|(a, b, c, d)| examples::rectangle(&kf.fan, a, b, c, d))
        .collect();
    let eval = |p: &Polytope| j_integral(&kf, p, 1e-10).map(|e| e.value);
    let fit = fit_polynomial(&eval, &polys, &hold, 2)?;
    // J = (a0+a1)(a2+a3) − 2(a0+a1+a2+a3) + 4 in support numbers a = −T.
    let mut coef_err = 0.0f64;
    for e in polytrunc_core::polynomiality::monomials(4, 2) {
        let want = match e.as_slice() {
            [0, 0, 0, 0] => 4.0,
            [1, 0, 1, 0] | [1, 0, 0, 1] | [0, 1, 1, 0] | [0, 1, 0, 1] => 1.0,
            e if e.iter().sum::<u32>() == 1 => -2.0,
            _ => 0.0,
        };
        coef_err = coef_err.max((fit.polynomial.coefficient(&e) - want).abs());
    }
    Ok((
        worst < RECT_REL && coef_err < RECT_COEF_ABS,
        format!("81 rectangles, max rel err {worst:.2e}; fitted coefficients max abs err {coef_err:.2e}"),
    ))
}

fn bg_holds(p: &Polytope) -> Result<bool> {
    let bg = brianchon_gram(&p.support, Direction::Inward)?;
    Ok(chains_equal(&bg, &Chain::indicator(p.region()), &EqualityMode::Exact)?.holds())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    for (n, count) in [(2, 20), (3, 5)] {
        for _ in 0..count {
            if !bg_holds(&simple_polytope(&mut rng, n))? {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((failures == 0 && secs < BG_SECONDS, format!("25 polytopes, {failures} failures, {secs:.1}s")))
}

/// The quadrangle fan with rays `(1,0), (0,1), (−1,−1), (0,−1)`.
fn quadrangle_fan() -> Arc<Fan> {
    let rays = vec![vec_i(&[1, 0]), vec_i(&[0, 1]), vec_i(&[-1, -1]), vec_i(&[0, -1])];
    Arc::new(Fan::new(Space::euclidean(2), rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap())
}

fn support_of_h(fan: &Arc<Fan>, h: &[i64]) -> SupportVector {
    SupportVector::new(fan.clone(), h.iter().map(|&v| rat(-v)).collect()).unwrap()
}

fn generic_xis(rng: &mut ChaCha8Rng, s: &SupportVector, count: usize) -> Result<Vec<(Vector, Chain)>> {
    let mut out = Vec::new();
    while out.len() < count {
        let xi = integer_direction(rng, 2, 7);
        match lawrence_varchenko(s, &xi) {
            Ok(c) => out.push((xi, c)),
            Err(Error::NonGenericXi { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut failures = 0;
    let quad = realize_polytope(&support_of_h(&quadrangle_fan(), &[2, 2, 1, 1]))?;
    let mut polys = vec![quad];
    while polys.len() < 21 {
        polys.push(simple_polytope(&mut rng, 2));
    }
    for p in &polys {
        let ind = Chain::indicator(p.region());
        for (_, lv) in generic_xis(&mut rng, &p.support, 5)? {
            checked += 1;
            if !chains_equal(&lv, &ind, &EqualityMode::Exact)?.holds() {
                failures += 1;
            }
        }
    }
    // Virtual quadrangle: the difference of two quadrangles on the same fan.
    let fan = quadrangle_fan();
    let (s1, s2) = (support_of_h(&fan, &[2, 2, 1, 1]), support_of_h(&fan, &[1, 1, 4, 1]));
    let virt = s1.sub(&s2)?;
    let target = virtual_characteristic(&VirtualPolytopePair::from_supports(&s1, &s2)?)?;
    for (_, lv) in generic_xis(&mut rng, &virt, 5)? {
        checked += 1;
        if !chains_equal(&lv, &target, &EqualityMode::Exact)?.holds() {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("{checked} (polytope, ξ) pairs incl. 5 on the virtual quadrangle, {failures} failures")))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut exact_fail = 0;
    for i in 0..20 {
        let n = 2 + i % 2;
        let c = simplicial_cone(&mut rng, n, true);
        if !verify_langlands(&c, &Space::euclidean(n), &EqualityMode::Exact)?.passed() {
            exact_fail += 1;
        }
    }
    let c = simplicial_cone(&mut rng, 4, true);
    let mode = EqualityMode::Sampled { samples: LANGLANDS_SAMPLES, seed: 5, radius: 8 };
    let sampled = verify_langlands(&c, &Space::euclidean(4), &mode)?.passed();
    Ok((exact_fail == 0 && sampled, format!("20 cones in dims 2-3: {exact_fail} failures; dim 4 sampled: {}", if sampled { "0 mismatches" } else { "mismatch" })))
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let hex = examples::hexagon_constant();
    let hp = realize_polytope(&SupportVector::new(hex.fan.clone(), vec![rat(-2); 6])?)?;
    let coord = Arc::new(polytrunc_core::geometry::fan::examples::coordinate_fan(2));
    let cp = realize_polytope(&SupportVector::new(coord, vec![rat(-2), rat(-1), rat(-3), rat(0)])?)?;
    for (name, p) in [("hexagonal", &hp), ("coordinate", &cp)] {
        let mut bad = 0;
        for sigma in 0..p.fan().cones.len() {
            if !verify_double_partition(p, sigma, PARTITION_SAMPLES, sigma as u64)?.passed() {
                bad += 1;
            }
        }
        ok &= bad == 0;
        notes.push(format!("{name}: {bad} failing cones"));
    }
    let ob = examples::obtuse_family();
    let tri = examples::obtuse_triangle(&ob.fan);
    let mut witness = None;
    for sigma in 0..tri.fan().cones.len() {
        let r = verify_double_partition(&tri, sigma, PARTITION_SAMPLES, 6)?;
        if !r.passed() {
            witness = Some(format!("cone {sigma}: {} violations, {} overlaps", r.violations.len(), r.overlaps.len()));
            break;
        }
    }
    ok &= witness.is_some();
    notes.push(format!("obtuse: {}", witness.unwrap_or_else(|| "no failure found".into())));
    Ok((ok, notes.join("; ")))
}

fn criterion_7() -> Outcome {
    let kf = examples::obtuse_family();
    let tri = examples::obtuse_triangle(&kf.fan);
    let table = divergence_probe(&kf, &tri, 3..=8)?;
    let incs: Vec<f64> = table.windows(2).map(|w| w[1].1.value - w[0].1.value).collect();
    let min_inc = incs.iter().cloned().fold(f64::INFINITY, f64::min);
    let vals: Vec<String> = table.iter().map(|(r, e)| format!("r={r}: {:.3}", e.value)).collect();
    Ok((min_inc >= 1.0, format!("min increment {min_inc:.3} per doubling; {}", vals.join(", "))))
}

fn criterion_8() -> Outcome {
    let intro = examples::intro_family();
    let rect = examples::rectangle_family();
    let hex = examples::hexagon_constant();
    let cases = [
        ("1-D", line_polytope(&intro, -1, 2), &intro),
        ("rectangle", examples::rectangle(&rect.fan, rat(1), ratio(1, 2), rat(2), ratio(3, 2)), &rect),
        ("hexagon", realize_polytope(&SupportVector::new(hex.fan.clone(), vec![rat(-2), rat(-2), rat(-2), rat(-2), rat(-2), rat(-2)])?)?, &hex),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, p, kf) in cases.iter() {
        let r = polynomiality_identity_check(kf, p, 1e-10)?;
        ok &= r.discrepancy < IDENTITY_TOL;
        notes.push(format!("{name}: {:.2e}", r.discrepancy));
    }
    Ok((ok, format!("discrepancies {}", notes.join(", "))))
}

/// A random lattice polygon whose normal fan is acute.
fn acute_lattice_polygon(rng: &mut ChaCha8Rng) -> Polytope {
    use rand::Rng;
    loop {
        let k = rng.gen_range(4..=8);
        let mut normals: Vec<Vector> = Vec::new();
        while normals.len() < k {
            let d = integer_direction(rng, 2, 4);
            if !normals.contains(&d) {
                normals.push(d);
            }
        }
        let ang = |v: &Vector| to_f64(&v[1]).atan2(to_f64(&v[0]));
        normals.sort_by(|a, b| ang(a).partial_cmp(&ang(b)).unwrap());
        let acute = (0..k).all(|i| {
            let (u, v) = (&normals[i], &normals[(i + 1) % k]);
            let dot = &u[0] * &v[0] + &u[1] * &v[1];
            let cross = &u[0] * &v[1] - &u[1] * &v[0];
            dot >= rat(0) && cross > rat(0)
        });
        if !acute {
            continue;
        }
        let offsets: Vec<Rat> = (0..k).map(|_| rat(rng.gen_range(1..=5))).collect();
        let Ok(p) = Polytope::from_h_representation(Space::euclidean(2), normals, offsets) else { continue };
        let mut l = num_bigint::BigInt::from(1);
        for v in p.to_vpolytope().vertices {
            for c in v {
                l = l.lcm(c.denom());
            }
        }
        if l > num_bigint::BigInt::from(4) {
            continue;
        }
        let Ok(q) = realize_polytope(&p.support.scale(&Rat::from_integer(l))) else { continue };
        return q;
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    for _ in 0..10 {
        let p = acute_lattice_polygon(&mut rng);
        let kf = KFamily::constant(p.fan().clone(), rat(1));
        let s = s_lattice_sum_exact(&kf, &p, &zeros(2))?;
        let c = lattice_count_chain(&Chain::indicator(p.region()), &zeros(2))?;
        if s != c {
            mismatches += 1;
        }
    }
    let coord = Arc::new(polytrunc_core::geometry::fan::examples::coordinate_fan(2));
    let kf = KFamily::constant(coord.clone(), rat(1));
    let unit = realize_polytope(&SupportVector::new(coord, vec![rat(-1), rat(0), rat(-1), rat(0)])?)?;
    let samples: Vec<(Vec<Rat>, Rat)> =
        dilations(&unit, 6)?.into_iter().map(|(t, p)| Ok((vec![t], s_lattice_sum_exact(&kf, &p, &zeros(2))?))).collect::<Result<_>>()?;
    let (poly, resid) = fit_polynomial_exact(&["t".to_string()], &samples, 2)?;
    let ehrhart = poly.coefficient(&[2]) == rat(1) && poly.coefficient(&[1]) == rat(2) && poly.coefficient(&[0]) == rat(1) && resid == rat(0);
    let diag = Arc::new(polytrunc_core::geometry::fan::examples::diagonal_ray_fan());
    let dk = KFamily::constant(diag.clone(), rat(1));
    let dp = realize_polytope(&SupportVector::new(diag, vec![rat(-2), rat(-3), rat(-2), rat(0), rat(0)])?)?;
    let probe = discrete_identity_probe(&dk, &dp)?;
    let max_cosets = probe.cosets.iter().map(|c| c.1).max().unwrap_or(0);
    let ok = mismatches == 0 && ehrhart && probe.agrees() && max_cosets == 2;
    Ok((
        ok,
        format!(
            "10 polygons: {mismatches} mismatches; dilation fit {poly} (residual {resid}); probe {} = {} with |M'| = {max_cosets}",
            probe.direct, probe.via_cosets
        ),
    ))
}

fn criterion_10() -> Outcome {
    let kf = examples::exponential_family();
    let rejected = matches!(certify(&kf).verdict, Verdict::Failed(_));
    let opts = QuadOptions::new(1e-12);
    let grid: Vec<i64> = (-8..=8).collect();
    let mut samples = Vec::new();
    for &a in &grid {
        for &b in &grid {
            if a < b {
                let p = examples::interval(&kf.fan, ratio(a, 4), ratio(b, 4));
                let j = j_integral_unchecked(&kf, &p, &opts)?.estimate.value;
                samples.push((p.support.a.iter().map(to_f64).collect::<Vec<f64>>(), j));
            }
        }
    }
    let names = vec!["a0".to_string(), "a1".to_string()];
    let mut residuals = Vec::new();
    let mut ok = rejected;
    for d in 0..=6 {
        let r = fit_samples(&names, &samples, &[], d, "[a,b] ⊂ [−2,2], step 1/4")?;
        ok &= r.fit_residual > EXP_RESIDUAL_MIN;
        residuals.push(format!("d{d}: {:.2e}", r.fit_residual));
    }
    Ok((ok, format!("certificate {}; max fit residuals {}", if rejected { "rejected" } else { "NOT rejected" }, residuals.join(", "))))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1-D truncation", criterion_1),
        ("rectangle", criterion_2),
        ("Brianchon-Gram", criterion_3),
        ("Lawrence-Varchenko", criterion_4),
        ("Langlands lemma", criterion_5),
        ("double partition", criterion_6),
        ("divergence probe", criterion_7),
        ("polynomiality identity", criterion_8),
        ("Ehrhart/discrete", criterion_9),
        ("non-polynomial counterexample", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
