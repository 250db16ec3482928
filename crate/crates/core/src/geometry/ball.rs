//! Geodesic balls and closed-form cap measures on Sⁿ.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::point::{offset, sample_tangent_direction, SpherePoint};
use crate::error::{Error, Result};

/// Open geodesic ball B(center, radius) with 0 < radius < π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall")]
pub struct GeodesicBall {
    center: SpherePoint,
    radius: f64,
    #[serde(skip)]
    cos_radius: f64,
}

#[derive(Deserialize)]
struct RawBall {
    center: SpherePoint,
    radius: f64,
}

impl TryFrom<RawBall> for GeodesicBall {
    type Error = Error;
    fn try_from(raw: RawBall) -> Result<Self> {
        GeodesicBall::new(raw.center, raw.radius)
    }
}

impl GeodesicBall {
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < PI) {
            return Err(Error::Parameter(format!(
                "geodesic ball radius must lie in (0, π), got {radius}"
            )));
        }
        Ok(Self { center, radius, cos_radius: radius.cos() })
    }

    #[inline]
    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Open-ball membership, decided on the inner product.
    #[inline]
    pub fn contains(&self, x: &SpherePoint) -> bool {
        x.dot(&self.center) > self.cos_radius
    }

    pub fn measure(&self) -> f64 {
        cap_measure(self.dim(), self.radius)
    }

    /// True if the closures of the two balls do not meet.
    pub fn is_disjoint_from(&self, other: &GeodesicBall) -> bool {
        let d = self.center.dot(&other.center).clamp(-1.0, 1.0).acos();
        d > self.radius + other.radius
    }

    /// True if `inner` lies inside `self`.
    pub fn contains_ball(&self, inner: &GeodesicBall) -> bool {
        let d = self.center.dot(&inner.center).clamp(-1.0, 1.0).acos();
        d + inner.radius <= self.radius
    }

    /// Uniform sample from the ball.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpherePoint {
        let n = self.dim();
        let theta = inverse_cap_measure(n, rng.random::<f64>() * self.measure());
        let dir = sample_tangent_direction(&self.center, rng);
        offset(&self.center, &dir, theta.min(self.radius))
    }
}

/// |Sⁿ|
pub fn sphere_measure(n: usize) -> f64 {
    match n {
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        _ => panic!("unsupported sphere dimension {n}"),
    }
}

/// |Sⁿ⁻¹|, the measure of the unit sphere of directions in a tangent space.
pub fn direction_measure(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported sphere dimension {n}"),
    }
}

/// x − sin x without cancellation for small x.
fn x_minus_sin(x: f64) -> f64 {
    if x < 0.5 {
        let x2 = x * x;
        // Horner form of x³/3! − x⁵/5! + x⁷/7! − x⁹/9! + x¹¹/11! − x¹³/13!
        x * x2
            * (1.0 / 6.0
                - x2 * (1.0 / 120.0
                    - x2 * (1.0 / 5040.0
                        - x2 * (1.0 / 362_880.0
                            - x2 * (1.0 / 39_916_800.0 - x2 / 6_227_020_800.0)))))
    } else {
        x - x.sin()
    }
}

/// Measure of the cap of geodesic radius `theta` on Sⁿ.
pub fn cap_measure(n: usize, theta: f64) -> f64 {
    let theta = theta.clamp(0.0, PI);
    match n {
        1 => 2.0 * theta,
        2 => {
            let s = (0.5 * theta).sin();
            4.0 * PI * s * s
        }
        // 2π(θ − sin θ cos θ) = π(2θ − sin 2θ)
        3 => PI * x_minus_sin(2.0 * theta),
        _ => panic!("unsupported sphere dimension {n}"),
    }
}

/// Inverse of [`cap_measure`] in its radius argument.
pub fn inverse_cap_measure(n: usize, measure: f64) -> f64 {
    let total = sphere_measure(n);
    let m = measure.clamp(0.0, total);
    match n {
        1 => 0.5 * m,
        2 => 2.0 * (m / (4.0 * PI)).sqrt().min(1.0).asin(),
        3 => {
            // Solve x − sin x = m/π for x = 2θ ∈ [0, 2π].
            let target = m / PI;
            if target == 0.0 {
                return 0.0;
            }
            let (mut lo, mut hi) = (0.0_f64, 2.0 * PI);
            let mut x = (6.0 * target).cbrt().min(2.0 * PI);
            for _ in 0..100 {
                let f = x_minus_sin(x) - target;
                if f > 0.0 {
                    hi = x;
                } else {
                    lo = x;
                }
                let s = (0.5 * x).sin();
                let df = 2.0 * s * s;
                let mut next = if df > 0.0 { x - f / df } else { 0.5 * (lo + hi) };
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if (next - x).abs() <= 1e-15 * x.max(1e-300) {
                    x = next;
                    break;
                }
                x = next;
            }
            0.5 * x
        }
        _ => panic!("unsupported sphere dimension {n}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::sample_uniform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_cap_is_whole_sphere() {
        for n in 1..=3 {
            let total = cap_measure(n, PI);
            assert!((total - sphere_measure(n)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn cap_measure_matches_quadrature() {
        // ∫₀^θ |Sⁿ⁻¹| sin^{n-1} t dt by composite Simpson
        for n in 1..=3 {
            for &theta in &[1e-3, 0.1, 0.7, 1.5, 2.9] {
                let steps = 2000;
                let h = theta / steps as f64;
                let f = |t: f64| direction_measure(n) * t.sin().powi(n as i32 - 1);
                let mut acc = f(0.0) + f(theta);
                for i in 1..steps {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * f(i as f64 * h);
                }
                let simpson = acc * h / 3.0;
                let rel = (cap_measure(n, theta) - simpson).abs() / simpson;
                assert!(rel < 1e-9, "n = {n}, θ = {theta}, rel = {rel}");
            }
        }
    }

    #[test]
    fn inverse_cap_round_trips_down_to_tiny_radii() {
        for n in 1..=3 {
            for &theta in &[1e-7, 3e-6, 1e-3, 0.2, 1.0, 2.0, 3.1] {
                let back = inverse_cap_measure(n, cap_measure(n, theta));
                assert!(
                    (back - theta).abs() < 1e-10 * theta.max(1e-3),
                    "n = {n}, θ = {theta}, back = {back}"
                );
            }
        }
    }

    #[test]
    fn ball_samples_stay_inside_and_fill_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_uniform(3, &mut rng);
        let ball = GeodesicBall::new(c, 0.6).unwrap();
        let half = GeodesicBall::new(c, 0.3).unwrap();
        let n = 40_000;
        let mut inner = 0;
        for _ in 0..n {
            let x = ball.sample(&mut rng);
            assert!(c.dot(&x) >= 0.6f64.cos() - 1e-12);
            if half.contains(&x) {
                inner += 1;
            }
        }
        let want = half.measure() / ball.measure();
        let got = inner as f64 / n as f64;
        assert!((got - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt());
    }

    #[test]
    fn rejects_bad_radius() {
        let c = SpherePoint::north(2);
        assert!(GeodesicBall::new(c, 0.0).is_err());
        assert!(GeodesicBall::new(c, PI).is_err());
        assert!(serde_json::from_str::<GeodesicBall>(r#"{"center":[0,0,1],"radius":4.0}"#).is_err());
    }
}
