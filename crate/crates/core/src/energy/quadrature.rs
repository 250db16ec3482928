use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::EnergyParams;
use crate::error::{Error, Result};
use crate::geometry::{direction_measure, fibonacci_lattice, offset, sphere_measure, SpherePoint, MAX_DIM};
use crate::maps::SphereMap;

/// Largest number of (x, y) evaluations a quadrature may request.
pub const PAIR_BUDGET: u64 = 1_000_000_000;

/// Dyadic radial intervals [π2^{−j−1}, π2^{−j}] below which the integrand
/// is dropped.
const RADIAL_INTERVALS: usize = 16;

const SUPER_FIB_PHI: f64 = std::f64::consts::SQRT_2;
/// Root of ψ⁴ = ψ + 4.
const SUPER_FIB_PSI: f64 = 1.533_751_168_755_204_3;

/// Product rule: outer points × inner directions × Gauss-Legendre radial
/// nodes on dyadic intervals in geodesic polar coordinates around x.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureRule {
    pub outer: usize,
    pub directions: usize,
    pub radial_nodes: usize,
    pub intervals: usize,
}

impl QuadratureRule {
    /// Every count grows linearly in `resolution`.
    pub fn for_resolution(n: usize, resolution: usize) -> Self {
        let r = resolution.max(1);
        let (outer, directions) = match n {
            1 => (64 * r, 2),
            2 => (100 * r, 6 * r),
            _ => (200 * r, 12 * r),
        };
        Self { outer, directions, radial_nodes: 2 * r + 2, intervals: RADIAL_INTERVALS }
    }

    pub fn pairs(&self) -> u64 {
        self.outer as u64 * self.directions as u64 * self.radial_nodes as u64 * self.intervals as u64
    }
}

/// n points of the super-Fibonacci spiral on S³.
pub fn super_fibonacci(n: usize) -> Vec<SpherePoint> {
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let t = s / n as f64;
            let (r, big_r) = (t.sqrt(), (1.0 - t).sqrt());
            let (sa, ca) = (TAU * s / SUPER_FIB_PHI).sin_cos();
            let (sb, cb) = (TAU * s / SUPER_FIB_PSI).sin_cos();
            SpherePoint::normalized(&[r * sa, r * ca, big_r * sb, big_r * cb]).expect("nonzero")
        })
        .collect()
}

fn outer_points(n: usize, count: usize) -> Vec<SpherePoint> {
    match n {
        1 => (0..count)
            .map(|i| {
                let (s, c) = (TAU * (i as f64 + 0.5) / count as f64).sin_cos();
                SpherePoint::normalized(&[c, s]).expect("unit")
            })
            .collect(),
        2 => fibonacci_lattice(count),
        _ => super_fibonacci(count),
    }
}

/// Unit vectors of S^{n−1} in tangent coordinates, equal weights.
fn directions(n: usize, count: usize) -> Vec<[f64; MAX_DIM]> {
    match n {
        1 => vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
        2 => (0..count)
            .map(|i| {
                let (s, c) = (TAU * (i as f64 + 0.5) / count as f64).sin_cos();
                [c, s, 0.0]
            })
            .collect(),
        _ => fibonacci_lattice(count)
            .into_iter()
            .map(|p| [p.coords()[0], p.coords()[1], p.coords()[2]])
            .collect(),
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1].
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

pub fn energy_quadrature(u: &SphereMap, params: &EnergyParams, resolution: usize) -> Result<f64> {
    let rule = QuadratureRule::for_resolution(params.n, resolution);
    energy_quadrature_with(u, params, &rule)
}

/// Deterministic estimate of E_{s,p}(u, Sⁿ).
pub fn energy_quadrature_with(u: &SphereMap, params: &EnergyParams, rule: &QuadratureRule) -> Result<f64> {
    params.validate()?;
    let n = params.n;
    if u.domain_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.domain_dim() });
    }
    let pairs = rule.pairs();
    if pairs > PAIR_BUDGET {
        return Err(Error::BudgetExceeded { pairs, budget: PAIR_BUDGET });
    }
    if rule.outer == 0 || rule.directions == 0 || rule.radial_nodes == 0 {
        return Err(Error::Parameter("quadrature rule with an empty factor".into()));
    }
    if u.constant_value().is_some() {
        return Ok(0.0);
    }

    let (p, q) = (params.p, params.kernel_exponent());
    let gl = gauss_legendre(rule.radial_nodes);
    // (θ, weight·sin^{n−1}θ / chord^q)
    let radial: Vec<(f64, f64)> = (0..rule.intervals)
        .flat_map(|j| {
            let hi = PI * 0.5f64.powi(j as i32);
            let (mid, half) = (0.75 * hi, 0.25 * hi);
            gl.iter()
                .map(move |&(t, w)| {
                    let theta = mid + half * t;
                    let chord = 2.0 * (0.5 * theta).sin();
                    (theta, half * w * theta.sin().powi(n as i32 - 1) / chord.powf(q))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let dirs = directions(n, rule.directions);
    let dir_weight = direction_measure(n) / dirs.len() as f64;
    let outer = outer_points(n, rule.outer);
    let outer_weight = sphere_measure(n) / outer.len() as f64;

    let inner: Vec<f64> = outer
        .par_iter()
        .map(|x| {
            let ux = u.eval(x);
            let frame = x.tangent_frame();
            let mut acc = 0.0;
            for d in &dirs {
                let mut t = [0.0; MAX_DIM + 1];
                for (k, dk) in d.iter().enumerate().take(n) {
                    let col = frame.column(k);
                    for i in 0..=n {
                        t[i] += dk * col[i];
                    }
                }
                for &(theta, w) in &radial {
                    let uy = u.eval(&offset(x, &t, theta));
                    let d2: f64 = ux.coords().iter().zip(uy.coords()).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 > 0.0 {
                        acc += w * d2.powf(0.5 * p);
                    }
                }
            }
            acc * dir_weight
        })
        .collect();
    Ok(inner.iter().sum::<f64>() * outer_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{constant, hopf_map, identity};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for m in 1..12 {
            let gl = gauss_legendre(m);
            let wsum: f64 = gl.iter().map(|(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            for k in 0..2 * m {
                let integral: f64 = gl.iter().map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
                assert!((integral - exact).abs() < 1e-13, "m = {m}, k = {k}");
            }
        }
    }

    #[test]
    fn super_fibonacci_is_roughly_uniform() {
        let pts = super_fibonacci(20_000);
        for axis in 0..4 {
            let mean: f64 = pts.iter().map(|p| p.coords()[axis]).sum::<f64>() / pts.len() as f64;
            assert!(mean.abs() < 1e-3, "axis {axis}: {mean}");
        }
    }

    #[test]
    fn constant_is_exactly_zero() {
        let c = constant(3, SpherePoint::north(2)).unwrap();
        let params = EnergyParams::critical(0.5, 3).unwrap();
        assert_eq!(energy_quadrature(&c, &params, 2).unwrap(), 0.0);
    }

    #[test]
    fn budget_is_enforced() {
        let params = EnergyParams::critical(0.5, 3).unwrap();
        assert!(matches!(
            energy_quadrature(&hopf_map(), &params, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn identity_on_circle_matches_closed_form() {
        let s = 0.3;
        let params = EnergyParams::new(s, 2.0, 1).unwrap();
        let v = energy_quadrature(&identity(1).unwrap(), &params, 8).unwrap();
        // 2π·∫₀^{2π} (2 sin(t/2))^{1−2s} dt = 2π·2^{2−2s}·∫₀^π sin^{1−2s} u du
        let m = 400_000;
        let h = PI / m as f64;
        let f = |t: f64| t.sin().powf(1.0 - 2.0 * s);
        let mut acc = f(0.0) + f(PI);
        for i in 1..m {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let exact = TAU * 2f64.powf(2.0 - 2.0 * s) * acc * h / 3.0;
        // the dropped inner ball holds ∫₀^ε t^{1−2s} dt ≈ 1e−5 of the mass
        assert!((v - exact).abs() / exact < 1e-4, "{v} vs {exact}");
    }
}
