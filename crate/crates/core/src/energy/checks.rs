use serde::{Deserialize, Serialize};

use super::{combined_se, energy_mc, EnergyEstimate, EnergyParams, Region};
use crate::error::{Error, Result};
use crate::geometry::{GeodesicBall, SpherePoint};
use crate::maps::{composed_with_hopf, SphereMap};

/// Gluing constants above this count as a violation.
pub const GLUING_CONSTANT_CAP: f64 = 1e6;

/// E(u, A) ≤ (1 + C/(1−η)^{sp+1})·E(u, B(ρ)) + (1 + Cηᵐ/(1−η))·E(u, A∖B(ηρ)),
/// with the smallest C ≥ 0 that makes it hold on the point estimates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluingReport {
    pub whole: EnergyEstimate,
    pub ball: EnergyEstimate,
    pub outside: EnergyEstimate,
    pub eta: f64,
    pub rho: f64,
    /// Smallest C ≥ 0 for the point estimates; infinite if none exists.
    pub constant: f64,
    pub constant_se: f64,
    pub satisfied: bool,
}

/// E(u, S³) ≤ 2^p Σᵢ E(uᵢ, S³).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatchingReport {
    pub patched: EnergyEstimate,
    pub pieces: Vec<EnergyEstimate>,
    pub factor: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// E(u) / Σ E(uᵢ); at most 2^p when the bound holds.
    pub ratio: Option<f64>,
    pub holds: bool,
}

/// E_{s,p}(v∘h, S³) / E_{s,p}(v, S²) with p = 3/s on both sides.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberComparison {
    pub lifted: EnergyEstimate,
    pub base: EnergyEstimate,
    /// `None` when E(v, S²) vanishes.
    pub ratio: Option<f64>,
    pub ratio_se: Option<f64>,
}

/// `a` must be the whole sphere or a ball containing B(center, ρ).
#[allow(clippy::too_many_arguments)]
pub fn check_gluing_bound(
    u: &SphereMap,
    a: &Region,
    center: &SpherePoint,
    eta: f64,
    rho: f64,
    params: &EnergyParams,
    n_samples: usize,
    seed: u64,
) -> Result<GluingReport> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Parameter(format!("η must lie in (0, 1), got {eta}")));
    }
    let n = params.n;
    if center.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: center.dim() });
    }
    let big = GeodesicBall::new(*center, rho)?;
    let small = GeodesicBall::new(*center, eta * rho)?;
    let outside = match a {
        Region::Whole => Region::complement(small),
        Region::Ball { ball } => {
            if !ball.contains_ball(&big) {
                return Err(Error::Precondition(format!(
                    "B({center:?}, {rho}) is not inside the region ball"
                )));
            }
            Region::difference(*ball, small)?
        }
        _ => {
            return Err(Error::Precondition(
                "gluing regions must be the whole sphere or a ball".into(),
            ))
        }
    };
    let whole = energy_mc(u, params, a, n_samples, seed)?;
    let ball = energy_mc(u, params, &Region::ball(big), n_samples, seed.wrapping_add(1))?;
    let rest = energy_mc(u, params, &outside, n_samples, seed.wrapping_add(2))?;

    let sp = params.s * params.p;
    let coef_ball = ball.value / (1.0 - eta).powf(sp + 1.0);
    let coef_rest = rest.value * eta.powi(n as i32) / (1.0 - eta);
    let denom = coef_ball + coef_rest;
    let excess = whole.value - ball.value - rest.value;
    let se = combined_se(&[whole.std_error, ball.std_error, rest.std_error]);
    let constant = if excess <= 0.0 {
        0.0
    } else if denom > 0.0 {
        excess / denom
    } else {
        f64::INFINITY
    };
    let constant_se = if denom > 0.0 { se / denom } else { f64::INFINITY };
    let satisfied = excess - 3.0 * se <= GLUING_CONSTANT_CAP * denom;
    Ok(GluingReport { whole, ball, outside: rest, eta, rho, constant, constant_se, satisfied })
}

/// Estimates both sides on the full sphere with common random numbers.
pub fn check_patching_bound(
    pieces: &[SphereMap],
    patched: &SphereMap,
    params: &EnergyParams,
    n_samples: usize,
    seed: u64,
) -> Result<PatchingReport> {
    let whole = energy_mc(patched, params, &Region::Whole, n_samples, seed)?;
    let estimates = pieces
        .iter()
        .map(|piece| energy_mc(piece, params, &Region::Whole, n_samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let factor = 2f64.powf(params.p);
    let sum: f64 = estimates.iter().map(|e| e.value).sum();
    let mut ses: Vec<f64> = estimates.iter().map(|e| factor * e.std_error).collect();
    ses.push(whole.std_error);
    let rhs = factor * sum;
    let holds = whole.value <= rhs + 3.0 * combined_se(&ses);
    Ok(PatchingReport {
        lhs: whole.value,
        ratio: (sum > 0.0).then(|| whole.value / sum),
        patched: whole,
        pieces: estimates,
        factor,
        rhs,
        holds,
    })
}

pub fn fiber_energy_comparison(v: &SphereMap, s: f64, n_samples: usize, seed: u64) -> Result<FiberComparison> {
    let lifted_map = composed_with_hopf(v)?;
    let p3 = EnergyParams::critical(s, 3)?;
    let p2 = EnergyParams::new(s, p3.p, 2)?;
    let lifted = energy_mc(&lifted_map, &p3, &Region::Whole, n_samples, seed)?;
    let base = energy_mc(v, &p2, &Region::Whole, n_samples, seed.wrapping_add(1))?;
    let (ratio, ratio_se) = if base.value > 0.0 {
        let r = lifted.value / base.value;
        let rel = if lifted.value > 0.0 {
            combined_se(&[lifted.std_error / lifted.value, base.std_error / base.value])
        } else {
            base.std_error / base.value
        };
        (Some(r), Some(r * rel))
    } else {
        (None, None)
    };
    Ok(FiberComparison { lifted, base, ratio, ratio_se })
}
