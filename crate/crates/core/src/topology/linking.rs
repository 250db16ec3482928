use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::{ClosedCurve, DegreeMethod, DegreeReport};
use crate::energy::super_fibonacci;
use crate::error::{Error, Result};
use crate::geometry::{rotation_taking, stereographic, Rotation, SpherePoint};
use crate::linalg::det3;

/// Candidate projection poles.
const POLE_CANDIDATES: usize = 2000;

/// Curves closer than this many times their larger vertex gap are rejected.
const SEPARATION_FACTOR: f64 = 10.0;

fn canonical_order(a: &ClosedCurve, b: &ClosedCurve) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.points()
            .iter()
            .zip(b.points())
            .flat_map(|(p, q)| p.coords().iter().zip(q.coords()))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn min_separation(a: &ClosedCurve, b: &ClosedCurve) -> f64 {
    a.points()
        .par_iter()
        .map(|p| b.distance_to(p))
        .reduce(|| f64::INFINITY, f64::min)
}

/// Segment midpoints and edge vectors of the projected polygon.
fn project(curve: &ClosedCurve, to_north: &Rotation) -> Result<Vec<([f64; 3], [f64; 3])>> {
    let pts: Vec<[f64; 3]> = curve
        .points()
        .iter()
        .map(|p| stereographic(&to_north.apply(p)).map(|v| [v[0], v[1], v[2]]))
        .collect::<Result<_>>()?;
    let n = pts.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            (
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])],
                [b[0] - a[0], b[1] - a[1], b[2] - a[2]],
            )
        })
        .collect())
}

/// Linking number of two disjoint closed curves in S³: project from a
/// point far from both and take the midpoint Gauss sum. The result does not
/// depend on argument order.
pub fn gauss_linking(c1: &ClosedCurve, c2: &ClosedCurve) -> Result<DegreeReport> {
    for c in [c1, c2] {
        if c.points()[0].dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: c.points()[0].dim() });
        }
    }
    let (a, b) = if canonical_order(c1, c2).is_gt() { (c2, c1) } else { (c1, c2) };
    let sep = min_separation(a, b);
    let limit = SEPARATION_FACTOR * a.max_gap().max(b.max_gap());
    if sep <= limit {
        return Err(Error::IllConditionedLinking(format!(
            "curves are {sep:.3e} apart, need more than {limit:.3e}"
        )));
    }
    let pole = super_fibonacci(POLE_CANDIDATES)
        .into_iter()
        .map(|p| (a.distance_to(&p).min(b.distance_to(&p)), p))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, p)| p)
        .expect("nonempty candidates");
    let to_north = rotation_taking(&pole, &SpherePoint::north(3))?;
    let (pa, pb) = (project(a, &to_north)?, project(b, &to_north)?);
    let total: f64 = pa
        .par_iter()
        .map(|(m1, d1)| {
            let mut acc = 0.0;
            for (m2, d2) in &pb {
                let r = [m1[0] - m2[0], m1[1] - m2[1], m1[2] - m2[2]];
                let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
                acc += det3(&r, d1, d2) / (len * len * len);
            }
            acc
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    let raw = total / (4.0 * PI);
    DegreeReport::from_raw(raw, DegreeMethod::Linking).ok_or_else(|| {
        Error::IllConditionedLinking(format!("Gauss sum {raw} is not near an integer"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::hopf_fiber_point;
    use std::f64::consts::TAU;

    fn hopf_fiber(z: &SpherePoint, n: usize) -> ClosedCurve {
        let pts = (0..n).map(|i| hopf_fiber_point(z, TAU * i as f64 / n as f64)).collect();
        ClosedCurve::new(pts, 2.0 * TAU / n as f64).unwrap()
    }

    fn small_circle(center: [f64; 4], radius: f64, n: usize) -> ClosedCurve {
        // circle in the (x₀, x₁) directions around a point with x₀ = x₁ = 0
        let pts = (0..n)
            .map(|i| {
                let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
                let mut p = center;
                p[0] += radius * c;
                p[1] += radius * s;
                SpherePoint::normalized(&p).unwrap()
            })
            .collect();
        ClosedCurve::new(pts, radius).unwrap()
    }

    #[test]
    fn hopf_fibers_link_once() {
        let a = hopf_fiber(&SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap(), 2000);
        let b = hopf_fiber(&SpherePoint::new(&[-1.0, 0.0, 0.0]).unwrap(), 2000);
        let l = gauss_linking(&a, &b).unwrap();
        assert_eq!(l.value.abs(), 1);
        assert!(l.residual < 0.05, "{}", l.raw);
        let r = gauss_linking(&a.reversed(), &b).unwrap();
        assert_eq!(r.value, -l.value);
        assert_eq!(gauss_linking(&b, &a).unwrap().raw.to_bits(), l.raw.to_bits());
    }

    #[test]
    fn separated_circles_do_not_link() {
        let a = small_circle([0.0, 0.0, 1.0, 0.0], 0.2, 500);
        let b = small_circle([0.0, 0.0, 0.0, 1.0], 0.2, 500);
        let l = gauss_linking(&a, &b).unwrap();
        assert_eq!(l.value, 0);
        assert!(l.residual < 0.02, "{}", l.raw);
    }

    #[test]
    fn touching_curves_are_rejected() {
        let a = hopf_fiber(&SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap(), 500);
        let b = hopf_fiber(&SpherePoint::normalized(&[1.0, 1e-3, 0.0]).unwrap(), 500);
        assert!(matches!(gauss_linking(&a, &b), Err(Error::IllConditionedLinking(_))));
    }
}
