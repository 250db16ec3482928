use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::{DegreeMethod, DegreeReport};
use crate::error::{Error, Result};
use crate::geometry::{rotation_taking, sphere_measure, GeodesicBall, Rotation, SpherePoint, MAX_DIM};
use crate::maps::SphereMap;

pub const MIN_GRID_CELLS: usize = 1000;

/// A cap B(center, radius) in spherical coordinates about its center:
/// polar angle χ ∈ [0, radius] and the remaining angles on S^{m−1}.
struct Chart {
    to_center: Rotation,
    radius: f64,
}

/// ∫ sin^{m−1} over [a, b].
fn sin_power_integral(m: usize, a: f64, b: f64) -> f64 {
    match m {
        1 => b - a,
        2 => a.cos() - b.cos(),
        _ => 0.5 * ((b - a) - 0.5 * ((2.0 * b).sin() - (2.0 * a).sin())),
    }
}

/// Σ over cells of det(Df)·|cell| inside one chart, at midpoints.
fn chart_integral(f: &SphereMap, chart: &Chart, cells: usize) -> f64 {
    let m = f.domain_dim();
    // m = 2: n × 2n cells; m = 3: n × n × 2n cells
    let n = match m {
        2 => ((cells as f64 / 2.0).sqrt().ceil() as usize).max(2),
        _ => ((cells as f64 / 2.0).cbrt().ceil() as usize).max(2),
    };
    let (n_chi, n_theta, n_phi) = if m == 2 { (n, 1, 2 * n) } else { (n, n, 2 * n) };
    let (d_chi, d_theta, d_phi) = (chart.radius / n_chi as f64, PI / n_theta as f64, TAU / n_phi as f64);
    let rows: Vec<f64> = (0..n_chi)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (i as f64 * d_chi, (i + 1) as f64 * d_chi);
            let chi = 0.5 * (a + b);
            let radial = sin_power_integral(m, a, b);
            let (sc, cc) = chi.sin_cos();
            let mut acc = 0.0;
            for j in 0..n_theta {
                let (ta, tb) = (j as f64 * d_theta, (j + 1) as f64 * d_theta);
                let theta = 0.5 * (ta + tb);
                let polar = if m == 2 { 1.0 } else { ta.cos() - tb.cos() };
                let (st, ct) = theta.sin_cos();
                for k in 0..n_phi {
                    let phi = (k as f64 + 0.5) * d_phi;
                    let (sp, cp) = phi.sin_cos();
                    let mut c = [0.0; MAX_DIM + 1];
                    if m == 2 {
                        c[..3].copy_from_slice(&[sc * cp, sc * sp, cc]);
                    } else {
                        c.copy_from_slice(&[sc * st * cp, sc * st * sp, sc * ct, cc]);
                    }
                    let local = SpherePoint::normalized(&c[..=m]).expect("unit");
                    let x = chart.to_center.apply(&local);
                    let det = f.tangent_jacobian(&x).det();
                    acc += det * radial * polar * d_phi;
                }
            }
            acc
        })
        .collect();
    rows.iter().sum()
}

fn disjoint(balls: &[GeodesicBall]) -> bool {
    balls.iter().enumerate().all(|(i, a)| balls[..i].iter().all(|b| a.is_disjoint_from(b)))
}

/// (1/|Sᵐ|)·∫ det(Df), with midpoint cells in spherical coordinates. When
/// f declares a support outside which it is constant, only the support
/// balls are gridded and `grid_size` cells are split among them.
pub fn mapping_degree(f: &SphereMap, grid_size: usize) -> Result<DegreeReport> {
    let m = f.domain_dim();
    if f.codomain_dim() != m {
        return Err(Error::DimensionMismatch { expected: m, got: f.codomain_dim() });
    }
    if !(2..=3).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    if grid_size < MIN_GRID_CELLS {
        return Err(Error::TooFewSamples { got: grid_size, min: MIN_GRID_CELLS });
    }
    if f.constant_value().is_some() {
        return Ok(DegreeReport::exact(0, DegreeMethod::JacobianIntegral));
    }
    let north = SpherePoint::north(m);
    let charts: Vec<Chart> = match f.support().filter(|s| disjoint(&s.balls)) {
        Some(s) => s
            .balls
            .iter()
            .map(|b| Ok(Chart { to_center: rotation_taking(&north, b.center())?, radius: b.radius() }))
            .collect::<Result<_>>()?,
        None => vec![Chart { to_center: Rotation::identity(m), radius: PI }],
    };
    let per_chart = (grid_size / charts.len()).max(MIN_GRID_CELLS);
    let total: f64 = charts.iter().map(|c| chart_integral(f, c, per_chart)).sum();
    let raw = total / sphere_measure(m);
    DegreeReport::from_raw(raw, DegreeMethod::JacobianIntegral)
        .ok_or(Error::UnresolvedDegree { raw, residual: (raw - raw.round()).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{constant, equator_collapse, identity, orientation_flip};

    #[test]
    fn identity_and_constant() {
        for m in 2..=3 {
            let d = mapping_degree(&identity(m).unwrap(), 20_000).unwrap();
            assert_eq!(d.value, 1);
            assert!(d.residual < 1e-3, "m = {m}: {}", d.raw);
            let c = constant(m, SpherePoint::north(m)).unwrap();
            assert_eq!(mapping_degree(&c, 20_000).unwrap().raw, 0.0);
        }
    }

    #[test]
    fn reflection_has_degree_minus_one() {
        let f = orientation_flip(&identity(2).unwrap());
        assert_eq!(mapping_degree(&f, 20_000).unwrap().value, -1);
    }

    #[test]
    fn equator_collapse_degree_depends_on_parity() {
        // 1 + (−1)^{m+1}
        assert_eq!(mapping_degree(&equator_collapse(2).unwrap(), 40_000).unwrap().value, 0);
        assert_eq!(mapping_degree(&equator_collapse(3).unwrap(), 100_000).unwrap().value, 2);
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(mapping_degree(&identity(2).unwrap(), 999).is_err());
    }
}
