use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DEFAULT_SEED;
use crate::energy::{
    check_gluing_bound, check_patching_bound, combined_se, energy_mc, energy_quadrature, fiber_energy_comparison,
    EnergyParams, Region,
};
use crate::error::{Error, Result};
use crate::geometry::{sample_uniform, SpherePoint};
use crate::maps::{
    bump_deg1, composed_with_hopf, hopf_bump, hopf_map, multi_bubble, prescribed_hopf_map, support_radius_of,
    DEFAULT_BASEPOINT,
};
use crate::topology::{bookkept_degree, hopf_invariant, mapping_degree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    HopfGradient,
    DegreeCertification,
    HopfInvariant,
    Bookkeeping,
    Patching,
    Gluing,
    BumpEnergy,
    FiberComparison,
    EstimatorSoundness,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        Self::HopfGradient,
        Self::DegreeCertification,
        Self::HopfInvariant,
        Self::Bookkeeping,
        Self::Patching,
        Self::Gluing,
        Self::BumpEnergy,
        Self::FiberComparison,
        Self::EstimatorSoundness,
    ];

    /// 1-based position in the suite.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).expect("listed") + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HopfGradient => "hopf-gradient",
            Self::DegreeCertification => "degree-certification",
            Self::HopfInvariant => "hopf-invariant",
            Self::Bookkeeping => "bookkeeping",
            Self::Patching => "patching",
            Self::Gluing => "gluing",
            Self::BumpEnergy => "bump-energy",
            Self::FiberComparison => "fiber-comparison",
            Self::EstimatorSoundness => "estimator-soundness",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;
    /// A name such as `gluing`, or a number 1…9.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(n) = s.parse::<usize>() {
            return n
                .checked_sub(1)
                .and_then(|i| Self::ALL.get(i).copied())
                .ok_or_else(|| Error::Parameter(format!("no check numbered {n}")));
        }
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest allowed ||∇h|² − 8|.
    pub gradient: f64,
    pub degree_residual: f64,
    pub hopf_residual: f64,
    /// Standard errors allowed in the statistical comparisons.
    pub se_multiplier: f64,
    /// Fiber ratios must lie within this factor of their median.
    pub fiber_ratio_factor: f64,
    /// Allowed relative drift of SE·√n across doublings.
    pub se_scaling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gradient: 1e-6,
            degree_residual: 0.05,
            hopf_residual: 0.05,
            se_multiplier: 3.0,
            fiber_ratio_factor: 3.0,
            se_scaling: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub checks: Vec<CheckId>,
    pub tolerances: Tolerances,
    pub samples: usize,
    pub seed: u64,
    pub degree_grid: usize,
    pub quadrature_resolution: usize,
    pub s: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            checks: CheckId::ALL.to_vec(),
            tolerances: Tolerances::default(),
            samples: 1_000_000,
            seed: DEFAULT_SEED,
            degree_grid: 200_000,
            quadrature_resolution: 8,
            s: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: CheckId,
    pub number: usize,
    pub passed: bool,
    /// What was measured, in words and numbers.
    pub measured: String,
    /// The threshold it was held to.
    pub criterion: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One line per check.
    pub fn to_table(&self) -> String {
        self.outcomes
            .iter()
            .map(|o| {
                format!(
                    "[{}] {} {:<20} {} (need {}; {:.1}s)\n",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.number,
                    o.id.name(),
                    o.measured,
                    o.criterion,
                    o.seconds
                )
            })
            .collect()
    }
}

/// Runs the selected checks in order; a check that errors is a failure.
pub fn run_verify(config: &VerifyConfig) -> VerifyReport {
    VerifyReport { outcomes: config.checks.iter().map(|&id| run_check(id, config)).collect() }
}

pub fn run_check(id: CheckId, config: &VerifyConfig) -> CheckOutcome {
    let start = Instant::now();
    let (passed, measured, criterion) = match evaluate(id, config) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}"), "no error".into()),
    };
    CheckOutcome { id, number: id.number(), passed, measured, criterion, seconds: start.elapsed().as_secs_f64() }
}

type Verdict = (bool, String, String);

fn basepoint() -> SpherePoint {
    SpherePoint::new(&DEFAULT_BASEPOINT).expect("unit vector")
}

fn evaluate(id: CheckId, c: &VerifyConfig) -> Result<Verdict> {
    let t = &c.tolerances;
    let b = basepoint();
    match id {
        CheckId::HopfGradient => {
            let h = hopf_map();
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let worst = (0..1000)
                .map(|_| (h.tangent_jacobian(&sample_uniform(3, &mut rng)).frobenius_sq() - 8.0).abs())
                .fold(0.0, f64::max);
            Ok((worst < t.gradient, format!("max ||∇h|² − 8| = {worst:.2e}"), format!("< {:.0e}", t.gradient)))
        }
        CheckId::DegreeCertification => {
            let mut cases = Vec::new();
            for m in [2, 3] {
                for r in [0.1, 0.3, 0.7] {
                    let f = bump_deg1(&SpherePoint::north(m), r, &SpherePoint::south(m))?;
                    cases.push((format!("bump S{m} r={r}"), f, 1));
                }
            }
            for k in 1..=9 {
                cases.push((format!("multi_bubble({k})"), multi_bubble(k, &b)?, k as i64));
            }
            let mut worst = 0.0f64;
            let mut wrong = Vec::new();
            for (name, f, expect) in &cases {
                let d = mapping_degree(f, c.degree_grid)?;
                worst = worst.max(d.residual);
                if d.value != *expect || d.residual >= t.degree_residual {
                    wrong.push(format!("{name}: {} (raw {:.6})", d.value, d.raw));
                }
            }
            let measured = if wrong.is_empty() {
                format!("{} maps at expected degree, max residual {worst:.2e}", cases.len())
            } else {
                format!("mismatches: {}", wrong.join("; "))
            };
            Ok((wrong.is_empty(), measured, format!("exact degree, residual < {}", t.degree_residual)))
        }
        CheckId::HopfInvariant => {
            let r = hopf_invariant(&hopf_map())?;
            let ok = r.value == 1 && r.residual < t.hopf_residual;
            Ok((ok, format!("deg_H(h) = {} (raw {:.6})", r.value, r.raw), format!("1, residual < {}", t.hopf_residual)))
        }
        CheckId::Bookkeeping => {
            let linked = hopf_invariant(&prescribed_hopf_map(1)?)?;
            let mut mismatches = Vec::new();
            if linked.value != 1 || linked.residual >= t.hopf_residual {
                mismatches.push(format!("linking of d = 1 gave {} (raw {:.4})", linked.value, linked.raw));
            }
            let degrees = [0, 1, 2, 5, 7, 9, -3];
            for d in degrees {
                let got = bookkept_degree(prescribed_hopf_map(d)?.descriptor())?.value;
                if got != d {
                    mismatches.push(format!("d = {d} bookkept as {got}"));
                }
            }
            let measured = if mismatches.is_empty() {
                format!("linking 1 (raw {:.6}); bookkeeping exact for {degrees:?}", linked.raw)
            } else {
                mismatches.join("; ")
            };
            Ok((mismatches.is_empty(), measured, "all equal to d".into()))
        }
        CheckId::Patching => {
            let u = prescribed_hopf_map(7)?;
            let pieces = u
                .patch_components()
                .ok_or_else(|| Error::Precondition("prescribed_hopf_map(7) is not a patch".into()))?;
            let params = EnergyParams::critical(c.s, 3)?;
            let r = check_patching_bound(&pieces, &u, &params, c.samples, c.seed)?;
            let measured = format!(
                "E(u) = {:.4e}, 2^p ΣE(u_i) = {:.4e} over {} pieces, ratio {:.3}",
                r.lhs,
                r.rhs,
                pieces.len(),
                r.ratio.unwrap_or(f64::NAN)
            );
            Ok((r.holds, measured, format!("ratio ≤ 2^p = {} within 3 SE", r.factor)))
        }
        CheckId::Gluing => {
            let r = 0.3;
            let center = SpherePoint::north(3);
            let u = hopf_bump(&center, r, &b)?;
            let params = EnergyParams::critical(c.s, 3)?;
            let rho = support_radius_of(r);
            let g = check_gluing_bound(&u, &Region::Whole, &center, 0.5, rho, &params, c.samples, c.seed)?;
            let ok = g.constant.is_finite() && g.satisfied;
            let measured = format!("C = {:.3e} ± {:.1e} (η = 1/2, ρ = {rho:.3})", g.constant, g.constant_se);
            Ok((ok, measured, "finite C, inequality within 3 SE".into()))
        }
        CheckId::BumpEnergy => {
            let params = EnergyParams::critical(c.s, 3)?;
            let mut est = Vec::new();
            for (i, r) in [0.1, 0.3].into_iter().enumerate() {
                let u = hopf_bump(&SpherePoint::north(3), r, &b)?;
                est.push(energy_mc(&u, &params, &Region::Whole, c.samples, c.seed.wrapping_add(i as u64))?);
            }
            let diff = (est[0].value - est[1].value).abs();
            let se = combined_se(&[est[0].std_error, est[1].std_error]);
            let measured = format!(
                "E(r=0.1) = {:.2} ± {:.2}, E(r=0.3) = {:.2} ± {:.2}, |Δ| = {:.2} SE",
                est[0].value,
                est[0].std_error,
                est[1].value,
                est[1].std_error,
                diff / se
            );
            Ok((diff <= t.se_multiplier * se, measured, format!("|Δ| ≤ {} SE", t.se_multiplier)))
        }
        CheckId::FiberComparison => {
            let mut ratios = Vec::new();
            for k in 1..=4 {
                let v = multi_bubble(k, &b)?;
                let r = fiber_energy_comparison(&v, c.s, c.samples, c.seed.wrapping_add(2 * k as u64))?;
                ratios.push(r.ratio.ok_or_else(|| Error::Precondition(format!("E(v_{k}, S²) vanished")))?);
            }
            let mut sorted = ratios.clone();
            sorted.sort_by(f64::total_cmp);
            let median = 0.5 * (sorted[1] + sorted[2]);
            let f = t.fiber_ratio_factor;
            let ok = ratios.iter().all(|r| *r <= f * median && *r >= median / f);
            let list: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
            Ok((ok, format!("ratios [{}], median {median:.3}", list.join(", ")), format!("within ×{f} of median")))
        }
        CheckId::EstimatorSoundness => estimator_soundness(c),
    }
}

fn estimator_soundness(c: &VerifyConfig) -> Result<Verdict> {
    let t = &c.tolerances;
    let params = EnergyParams::critical(c.s, 3)?;
    let maps = [
        ("hopf", hopf_map()),
        ("multi_bubble(2)∘h", composed_with_hopf(&multi_bubble(2, &basepoint())?)?),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, u) in &maps {
        let mc = energy_mc(u, &params, &Region::Whole, c.samples, c.seed)?;
        let quad = energy_quadrature(u, &params, c.quadrature_resolution)?;
        let z = (mc.value - quad).abs() / mc.std_error;
        ok &= z <= t.se_multiplier;
        parts.push(format!("{name}: MC {:.2} ± {:.2} vs quadrature {quad:.2} ({z:.2} SE)", mc.value, mc.std_error));
    }
    // SE·√n should stay put across three doublings
    let base = (c.samples / 8).max(crate::energy::MIN_SAMPLES);
    let mut scaled = Vec::new();
    for j in 0..4 {
        let n = base << j;
        let e = energy_mc(&maps[0].1, &params, &Region::Whole, n, c.seed.wrapping_add(100 + j))?;
        scaled.push(e.std_error * (n as f64).sqrt());
    }
    let drift = scaled.iter().map(|v| (v / scaled[0] - 1.0).abs()).fold(0.0, f64::max);
    ok &= drift <= t.se_scaling;
    parts.push(format!("SE·√n drift over n = {base}…{} is {:.1}%", base << 3, 100.0 * drift));
    Ok((ok, parts.join("; "), format!("≤ {} SE, drift ≤ {}%", t.se_multiplier, 100.0 * t.se_scaling)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_ids_parse_by_name_and_number() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
            assert_eq!(id.number().to_string().parse::<CheckId>().unwrap(), id);
        }
        assert!("0".parse::<CheckId>().is_err());
        assert!("10".parse::<CheckId>().is_err());
        assert!("nope".parse::<CheckId>().is_err());
    }

    #[test]
    fn empty_selection_gives_empty_passing_report() {
        let r = run_verify(&VerifyConfig { checks: Vec::new(), ..Default::default() });
        assert!(r.outcomes.is_empty() && r.all_passed());
    }

    #[test]
    fn cheap_checks_pass() {
        let config = VerifyConfig {
            checks: vec![CheckId::HopfGradient, CheckId::HopfInvariant],
            ..Default::default()
        };
        let r = run_verify(&config);
        assert!(r.all_passed(), "{}", r.to_table());
        assert_eq!(r.to_table().lines().count(), 2);
    }

    #[test]
    fn sabotaged_tolerance_is_reported() {
        let config = VerifyConfig {
            checks: vec![CheckId::HopfGradient, CheckId::DegreeCertification],
            tolerances: Tolerances { degree_residual: 1e-9, ..Default::default() },
            degree_grid: 20_000,
            ..Default::default()
        };
        let r = run_verify(&config);
        let failed: Vec<CheckId> = r.failures().map(|o| o.id).collect();
        assert_eq!(failed, vec![CheckId::DegreeCertification]);
    }
}
