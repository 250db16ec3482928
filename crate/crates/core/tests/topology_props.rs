use std::f64::consts::TAU;

use hopflab_core::geometry::{random_rotation, sample_uniform, Rotation, SpherePoint};
use hopflab_core::maps::{
    compose, composed_with_hopf, hopf_fiber_point, hopf_map, multi_bubble, orientation_flip, precompose_rotation,
    prescribed_hopf_map, rotation_map, SphereMap,
};
use hopflab_core::topology::{
    bookkept_degree, gauss_linking, hopf_invariant, mapping_degree, trace_fiber, ClosedCurve, DEFAULT_STEP,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn b() -> SpherePoint {
    SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap()
}

fn fiber(z: &SpherePoint, rot: &Rotation, n: usize) -> ClosedCurve {
    let pts = (0..n).map(|i| rot.apply(&hopf_fiber_point(z, TAU * i as f64 / n as f64))).collect();
    ClosedCurve::new(pts, 2.0 * TAU / n as f64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linking_is_symmetric_and_rotation_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z1 = sample_uniform(2, &mut rng);
        let z2 = sample_uniform(2, &mut rng);
        prop_assume!(z1.chord(&z2) > 0.3);
        let rot = random_rotation(3, &mut rng);
        let (a, b) = (fiber(&z1, &rot, 1500), fiber(&z2, &rot, 1500));
        let ab = gauss_linking(&a, &b).unwrap();
        let ba = gauss_linking(&b, &a).unwrap();
        prop_assert_eq!(ab.raw.to_bits(), ba.raw.to_bits());
        let id = Rotation::identity(3);
        let plain = gauss_linking(&fiber(&z1, &id, 1500), &fiber(&z2, &id, 1500)).unwrap();
        prop_assert_eq!(ab.value, plain.value);
        prop_assert!(ab.residual < 0.05);
    }
}

#[test]
fn hopf_invariant_survives_rotations_of_the_domain() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for f in [hopf_map(), prescribed_hopf_map(2).unwrap()] {
        let before = hopf_invariant(&f).unwrap().value;
        for _ in 0..3 {
            let g = precompose_rotation(&f, &random_rotation(3, &mut rng)).unwrap();
            assert_eq!(hopf_invariant(&g).unwrap().value, before);
        }
    }
}

#[test]
fn linking_agrees_with_bookkeeping() {
    let mut maps: Vec<SphereMap> = [-2, 3, 4, 6].iter().map(|&d| prescribed_hopf_map(d).unwrap()).collect();
    maps.push(composed_with_hopf(&multi_bubble(2, &b()).unwrap()).unwrap());
    maps.push(orientation_flip(&hopf_map()));
    for f in &maps {
        let linked = hopf_invariant(f).unwrap();
        let booked = bookkept_degree(f.descriptor()).unwrap();
        assert_eq!(linked.value, booked.value, "{}", f.descriptor().variant_name());
        assert!(linked.residual < 0.05);
    }
}

#[test]
fn jacobian_degree_agrees_with_bookkeeping() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rot = rotation_map(random_rotation(2, &mut rng));
    let maps = [
        multi_bubble(3, &b()).unwrap(),
        compose(&multi_bubble(2, &b()).unwrap(), &multi_bubble(3, &b()).unwrap()).unwrap(),
        compose(&rot, &multi_bubble(2, &b()).unwrap()).unwrap(),
        orientation_flip(&multi_bubble(2, &b()).unwrap()),
    ];
    for f in &maps {
        let coarse = mapping_degree(f, 100_000).unwrap();
        let fine = mapping_degree(f, 200_000).unwrap();
        let booked = bookkept_degree(f.descriptor()).unwrap();
        assert_eq!(coarse.value, booked.value);
        assert_eq!(fine.value, booked.value);
        assert!(fine.residual < 0.05);
    }
}

#[test]
fn fibers_of_bubbles_over_hopf_are_great_circles() {
    let v = multi_bubble(2, &b()).unwrap();
    let f = composed_with_hopf(&v).unwrap();
    let t = SpherePoint::new(&[-1.0, 0.0, 0.0]).unwrap();
    let seeds: Vec<SpherePoint> = hopflab_core::energy::super_fibonacci(20_000)
        .into_iter()
        .filter(|x| f.eval(x).chord(&t) < 0.3)
        .collect();
    let curves = trace_fiber(&f, &t, &seeds, DEFAULT_STEP).unwrap();
    assert_eq!(curves.len(), 2);
    for c in &curves {
        assert!((c.length() - TAU).abs() < 1e-2, "{}", c.length());
        assert!(c.points().iter().all(|p| f.eval(p).chord(&t) < 1e-8));
    }
}
