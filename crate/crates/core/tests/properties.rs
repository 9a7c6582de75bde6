//! Property tests of the exact layer: rationals, chains, decompositions,
//! incidence algebras and the homogeneity of Γ volumes.

use polytrunc_core::chains::{brianchon_gram, chains_equal, integrate_chain, lattice_count_chain, Chain, EqualityMode};
use polytrunc_core::geometry::fan::examples::{a2_fan, coordinate_fan, octagon_fan};
use polytrunc_core::geometry::random::simple_polytope;
use polytrunc_core::geometry::{realize_polytope, Direction, SupportVector};
use polytrunc_core::incidence::{incidence_convolve, mobius, rational_equal, FacePoset, IncidenceElement};
use polytrunc_core::polynomiality::vol_gamma;
use polytrunc_core::rational::{fmt_rat, parse_rat, rat, ratio, zeros, Rat};
use polytrunc_core::truncation::{s_lattice_sum_exact, KFamily};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn support(fan: &Arc<polytrunc_core::geometry::Fan>, a: &[i64]) -> SupportVector {
    SupportVector::new(fan.clone(), a.iter().map(|&v| rat(v)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let r = ratio(n, d);
        prop_assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
    }

    #[test]
    fn rectangle_volume_and_count(w in 1i64..6, h in 1i64..6, x0 in -3i64..3, y0 in -3i64..3) {
        // [x0, x0 + w] × [y0, y0 + h]
        let fan = Arc::new(coordinate_fan(2));
        let p = realize_polytope(&support(&fan, &[-(x0 + w), x0, -(y0 + h), y0])).unwrap();
        let ind = Chain::indicator(p.region());
        prop_assert_eq!(integrate_chain(&ind).unwrap(), rat(w * h));
        prop_assert_eq!(lattice_count_chain(&ind, &zeros(2)).unwrap(), rat((w + 1) * (h + 1)));
        let kf = KFamily::constant(fan, rat(1));
        prop_assert_eq!(s_lattice_sum_exact(&kf, &p, &zeros(2)).unwrap(), rat((w + 1) * (h + 1)));
    }

    #[test]
    fn mobius_inverts_zeta(rank in 0usize..5) {
        let poset = FacePoset::boolean(rank);
        let z = IncidenceElement::zeta(poset.clone(), Rat::from_integer(1.into()));
        let mz = incidence_convolve(&mobius(poset.clone()), &z).unwrap();
        prop_assert!(rational_equal(&mz, &IncidenceElement::delta(poset, Rat::from_integer(1.into()))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(12) })]

    #[test]
    fn brianchon_gram_on_random_polygons(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = simple_polytope(&mut rng, 2);
        let ind = Chain::indicator(p.region());
        for dir in [Direction::Inward, Direction::Outward] {
            let bg = brianchon_gram(&p.support, dir).unwrap();
            prop_assert!(chains_equal(&bg, &ind, &EqualityMode::Exact).unwrap().holds());
        }
    }

    #[test]
    fn vol_gamma_is_homogeneous(t in 1i64..5, pick in 0usize..3, c in 1i64..4) {
        let fan = Arc::new(match pick { 0 => coordinate_fan(2), 1 => a2_fan(), _ => octagon_fan() });
        let k = fan.num_rays();
        let a: Vec<i64> = (0..k).map(|i| -(c + (i as i64 % 2))).collect();
        let s = support(&fan, &a);
        prop_assume!(realize_polytope(&s).is_ok());
        let st = s.scale(&rat(t));
        for tau in 0..fan.cones.len() {
            let d = fan.cone_dim(tau) as u32;
            let lhs = vol_gamma(&st, tau).unwrap();
            let rhs = vol_gamma(&s, tau).unwrap() * rat(t.pow(d));
            prop_assert_eq!(lhs, rhs, "τ = {}", tau);
        }
    }
}
