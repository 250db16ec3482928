use hopflab_core::geometry::{random_rotation, sample_uniform, SpherePoint};
use hopflab_core::maps::{
    bump_deg1, hopf_fiber_point, hopf_map, lipschitz_probe, precompose_rotation, prescribed_hopf_map, SphereMap,
};
use hopflab_core::topology::bookkept_degree;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(m: usize, seed: u64) -> SpherePoint {
    sample_uniform(m, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hopf_values_are_unit_and_fibers_are_constant(seed in any::<u64>(), theta in 0.0..std::f64::consts::TAU) {
        let h = hopf_map();
        let x = point(3, seed);
        prop_assert!((h.eval(&x).norm() - 1.0).abs() < 1e-12);
        let z = h.eval(&x);
        prop_assert!(h.eval(&hopf_fiber_point(&z, theta)).chord(&z) < 1e-10);
    }

    #[test]
    fn bumps_equal_basepoint_outside_their_support(seed in any::<u64>(), r in 0.05f64..0.95, m in 2usize..=3) {
        let c = point(m, seed);
        let b = point(m, seed ^ 1);
        let f = bump_deg1(&c, r, &b).unwrap();
        let ball = f.support().unwrap().balls[0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x = sample_uniform(m, &mut rng);
            if !ball.contains(&x) {
                prop_assert_eq!(f.eval(&x), b);
            }
        }
    }

    #[test]
    fn prescribed_descriptors_round_trip_and_audit(d in -12i64..=12) {
        let u = prescribed_hopf_map(d).unwrap();
        let back = SphereMap::from_json(&u.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &u);
        prop_assert_eq!(bookkept_degree(back.descriptor()).unwrap().value, d);
    }

    #[test]
    fn rotation_precomposition_is_pointwise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rot = random_rotation(3, &mut rng);
        let h = hopf_map();
        let g = precompose_rotation(&h, &rot).unwrap();
        let x = sample_uniform(3, &mut rng);
        prop_assert!(g.eval(&x).chord(&h.eval(&rot.apply(&x))) < 1e-12);
    }
}

#[test]
fn bump_lipschitz_hint_bounds_the_probe() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for r in [0.1, 0.3, 0.7] {
        let f = bump_deg1(&SpherePoint::north(2), r, &SpherePoint::south(2)).unwrap();
        let hint = f.lipschitz_hint().unwrap();
        let probe = lipschitz_probe(&f, 20_000, &mut rng);
        assert!(probe <= hint * 1.01, "r = {r}: probe {probe} > hint {hint}");
        assert!(probe > 0.3 * hint, "r = {r}: probe {probe} far below hint {hint}");
    }
}

#[test]
fn hopf_jacobian_has_two_equal_singular_values() {
    // |∇h|² = 8 with operator norm 2 forces both singular values to equal 2
    let h = hopf_map();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let j = h.tangent_jacobian(&sample_uniform(3, &mut rng));
        assert!((j.frobenius_sq() - 8.0).abs() < 1e-10);
        assert!((j.operator_norm() - 2.0).abs() < 1e-8);
    }
}
