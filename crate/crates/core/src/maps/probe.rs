use rand::Rng;

use super::SphereMap;
use crate::geometry::{offset, sample_tangent_direction, sample_uniform};

/// Geodesic separation of the probe pairs.
pub const PROBE_SEPARATION: f64 = 1e-4;

/// Largest ratio d(u(x), u(y)) / d(x, y) over `n` random pairs at geodesic
/// distance [`PROBE_SEPARATION`]: a lower bound on the Lipschitz constant.
/// Pairs at the antipodal cut of the image are not a concern at this scale.
pub fn lipschitz_probe<R: Rng + ?Sized>(u: &SphereMap, n: usize, rng: &mut R) -> f64 {
    let m = u.domain_dim();
    let mut best: f64 = 0.0;
    for _ in 0..n {
        let x = sample_uniform(m, rng);
        let dir = sample_tangent_direction(&x, rng);
        let y = offset(&x, &dir, PROBE_SEPARATION);
        let (ux, uy) = (u.eval(&x), u.eval(&y));
        // geodesic distance from the chord, stable for tiny separations
        let image = 2.0 * (0.5 * ux.chord(&uy)).min(1.0).asin();
        let domain = 2.0 * (0.5 * x.chord(&y)).asin();
        best = best.max(image / domain);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpherePoint;
    use crate::maps::{bump_deg1, constant, hopf_map, identity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = constant(2, SpherePoint::north(2)).unwrap();
        assert_eq!(lipschitz_probe(&c, 1000, &mut rng), 0.0);
        let id = identity(2).unwrap();
        assert!((lipschitz_probe(&id, 1000, &mut rng) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn hopf_probe_matches_operator_norm() {
        // every tangent direction of h is stretched by exactly 2
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = hopf_map();
        let probe = lipschitz_probe(&h, 10_000, &mut rng);
        let mut op: f64 = 0.0;
        for _ in 0..1000 {
            let x = sample_uniform(3, &mut rng);
            op = op.max(h.tangent_jacobian(&x).operator_norm());
        }
        assert!((op - 2.0).abs() < 1e-9);
        assert!(probe <= op * (1.0 + 1e-6) && probe > 0.95 * op, "{probe} vs {op}");
        assert!(probe <= 8f64.sqrt());
    }

    #[test]
    fn bump_probe_scales_inversely_with_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x0, b) = (SpherePoint::south(2), SpherePoint::north(2));
        let probes: Vec<f64> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&r| {
                let f = bump_deg1(&x0, r, &b).unwrap();
                let ball = f.support().unwrap().balls[0];
                // concentrate pairs on the support so the max is seen
                let mut best: f64 = 0.0;
                for _ in 0..10_000 {
                    let x = ball.sample(&mut rng);
                    let dir = sample_tangent_direction(&x, &mut rng);
                    let y = offset(&x, &dir, PROBE_SEPARATION);
                    best = best.max(f.eval(&x).chord(&f.eval(&y)) / x.chord(&y));
                }
                assert!(best.is_finite());
                best * r
            })
            .collect();
        for w in probes.windows(2) {
            assert!(w[0] / w[1] < 2.0 && w[1] / w[0] < 2.0, "{probes:?}");
        }
    }
}
