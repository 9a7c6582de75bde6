//! Integration tests of truncation: pointwise decompositions of `k_Δ`,
//! `k_Δ = K₀` on `Δ`, and the behaviour of the quadrature under tolerance
//! refinement.

use polytrunc_core::geometry::random::point;
use polytrunc_core::geometry::Polytope;
use polytrunc_core::rational::{rat, ratio, vec_f64, Rat};
use polytrunc_core::truncation::{examples, j_integral, k_delta, k_pair, r_region, KFamily};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `Σ_{σ₂⪯σ₁} K_{σ₁,σ₂}(x) 1_{R^{σ₂}_{σ₁}}(x)`.
fn via_regions(kf: &KFamily, p: &Polytope, x: &[Rat]) -> f64 {
    let xf = vec_f64(x);
    kf.fan
        .face_pairs()
        .into_iter()
        .filter_map(|(s1, s2)| {
            let r = r_region(p, s1, s2).unwrap();
            (!r.empty && r.region.contains(x)).then(|| k_pair(kf, s1, s2).unwrap().eval(&xf))
        })
        .sum()
}

fn check_decomposition(kf: &KFamily, p: &Polytope, seed: u64) {
    let kd = k_delta(kf, p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = kf.fan.dim();
    for _ in 0..1000 {
        let x = point(&mut rng, n, 5, 4);
        let direct = kd.eval(&x);
        let split = via_regions(kf, p, &x);
        assert!((direct - split).abs() <= 1e-12 * direct.abs().max(1.0), "x = {x:?}: {direct} vs {split}");
    }
}

#[test]
fn decomposition_identity_on_1000_points() {
    let intro = examples::intro_family();
    check_decomposition(&intro, &examples::interval(&intro.fan, rat(-1), ratio(5, 2)), 1);
    let rect = examples::rectangle_family();
    check_decomposition(&rect, &examples::rectangle(&rect.fan, rat(1), ratio(1, 2), rat(2), ratio(3, 2)), 2);
}

#[test]
fn k_delta_is_k0_on_delta() {
    let rect = examples::rectangle_family();
    let p = examples::rectangle(&rect.fan, rat(2), rat(1), rat(1), rat(3));
    let kd = k_delta(&rect, &p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut inside = 0;
    for _ in 0..2000 {
        let x = point(&mut rng, 2, 4, 8);
        if p.contains(&x) {
            inside += 1;
            let k0 = rect.get(0).eval(&vec_f64(&x));
            assert!((kd.eval(&x) - k0).abs() < 1e-12, "{x:?}");
        }
    }
    assert!(inside > 100);
}

#[test]
fn halving_the_tolerance_stays_within_the_error_estimates() {
    let rect = examples::rectangle_family();
    let p = examples::rectangle(&rect.fan, ratio(3, 2), ratio(1, 3), rat(1), ratio(5, 4));
    let truth = examples::rectangle_closed_form(1.5, 1.0 / 3.0, 1.0, 1.25);
    let mut prev: Option<f64> = None;
    for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5] {
        let e = j_integral(&rect, &p, tol).unwrap();
        assert!((e.value - truth).abs() <= tol * truth, "tol {tol}: {} vs {truth}", e.value);
        if let Some(v) = prev {
            assert!((e.value - v).abs() <= 2.0 * tol * truth);
        }
        prev = Some(e.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn intro_integral_is_affine_in_the_endpoints(a in -8i64..8, len in 1i64..8, den in 1i64..4) {
        let kf = examples::intro_family();
        let (lo, hi) = (ratio(a, den), ratio(a, den) + ratio(len, den));
        let p = examples::interval(&kf.fan, lo.clone(), hi.clone());
        let j = j_integral(&kf, &p, 1e-12).unwrap().value;
        let want = 2.0 + polytrunc_core::rational::to_f64(&(hi - lo));
        prop_assert!((j - want).abs() < 1e-9 * want);
    }
}
