//! Stereographic projection from the north pole (0, …, 0, 1).

use super::point::{SpherePoint, MAX_DIM};
use crate::error::{Error, Result};

/// Inputs whose last coordinate exceeds this are treated as the pole.
pub const POLE_GUARD: f64 = 1.0 - 1e-9;

/// Π: Sᵐ ∖ {north} → Rᵐ, x ↦ x'/(1 − x_{m+1}).
pub fn stereographic(x: &SpherePoint) -> Result<Vec<f64>> {
    let m = x.dim();
    let last = x.coords()[m];
    if last >= POLE_GUARD {
        return Err(Error::SingularInput(format!(
            "stereographic projection of a point at the north pole (x_last = {last})"
        )));
    }
    // 1 − t = |x'|²/(1 + t) keeps relative precision near the pole.
    let denom = if last > 0.0 {
        x.coords()[..m].iter().map(|v| v * v).sum::<f64>() / (1.0 + last)
    } else {
        1.0 - last
    };
    Ok(x.coords()[..m].iter().map(|v| v / denom).collect())
}

/// Π⁻¹(y) = (2y/(1+|y|²), (|y|² − 1)/(1+|y|²)).
pub fn stereographic_inv(y: &[f64]) -> SpherePoint {
    let m = y.len();
    assert!((1..=MAX_DIM).contains(&m), "unsupported sphere dimension {m}");
    let r2: f64 = y.iter().map(|v| v * v).sum();
    let denom = 1.0 + r2;
    let mut c = [0.0; MAX_DIM + 1];
    for (ci, yi) in c.iter_mut().zip(y) {
        *ci = 2.0 * yi / denom;
    }
    c[m] = (r2 - 1.0) / denom;
    SpherePoint::from_array(m, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn south_pole_and_equator() {
        for m in 1..=3 {
            let s = stereographic(&SpherePoint::south(m)).unwrap();
            assert!(s.iter().all(|v| *v == 0.0));
            let eq = SpherePoint::basis(m, 0);
            let y = stereographic(&eq).unwrap();
            let n: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(stereographic_inv(&[0.0, 0.0]), SpherePoint::south(2));
        let p = stereographic_inv(&[0.6, 0.8, 0.0]);
        assert!(p.coords()[3].abs() < 1e-15);
        let far = stereographic_inv(&[1e6, 0.0]);
        assert!(far.chord(&SpherePoint::north(2)) < 1e-5);
        assert_ne!(far, SpherePoint::north(2));
    }

    #[test]
    fn north_pole_is_rejected() {
        assert!(matches!(
            stereographic(&SpherePoint::north(3)),
            Err(Error::SingularInput(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip(y in proptest::collection::vec(-1e3f64..1e3, 1..=3)) {
            let back = stereographic(&stereographic_inv(&y)).unwrap();
            for (a, b) in back.iter().zip(&y) {
                prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
            }
        }

        #[test]
        fn inverse_is_unit(y in proptest::collection::vec(-1e3f64..1e3, 1..=3)) {
            prop_assert!((stereographic_inv(&y).norm() - 1.0).abs() < 1e-12);
        }
    }
}
