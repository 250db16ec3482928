//! The fractional Sobolev energy
//!
//! E_{s,p}(u, Ω) = ∫_Ω ∫_Ω |u(x) − u(y)|^p / |x − y|^{n+sp} dy dx
//!
//! with chordal distances on both sides. [`energy_mc`] is a stratified Monte
//! Carlo estimator over dyadic geodesic shells around x; [`energy_quadrature`]
//! is a deterministic product rule used as an independent oracle.

mod checks;
mod mc;
mod quadrature;
mod region;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{
    check_gluing_bound, check_patching_bound, fiber_energy_comparison, FiberComparison, GluingReport,
    PatchingReport, GLUING_CONSTANT_CAP,
};
pub use mc::{energy_mc, energy_mc_with, pair_integrand, McOptions, DEFAULT_SHELLS, MIN_SAMPLES};
pub use quadrature::{
    energy_quadrature, energy_quadrature_with, super_fibonacci, QuadratureRule, PAIR_BUDGET,
};
pub use region::Region;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub s: f64,
    pub p: f64,
    /// Dimension of the domain sphere.
    pub n: usize,
    /// Whether sp = n was demanded.
    #[serde(default)]
    pub critical: bool,
}

impl EnergyParams {
    pub fn new(s: f64, p: f64, n: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Parameter(format!("s must lie in (0, 1), got {s}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must exceed 1, got {p}")));
        }
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        Ok(Self { s, p, n, critical: false })
    }

    /// The critical regime p = n/s.
    pub fn critical(s: f64, n: usize) -> Result<Self> {
        let mut params = Self::new(s, n as f64 / s, n)?;
        params.critical = true;
        Ok(params)
    }

    /// Re-checks sp = n when the critical flag is set.
    pub fn validate(&self) -> Result<()> {
        let checked = Self::new(self.s, self.p, self.n)?;
        if self.critical && (checked.s * checked.p - self.n as f64).abs() > 1e-12 * self.n as f64 {
            return Err(Error::Parameter(format!(
                "critical regime requires sp = n, got s·p = {} with n = {}",
                self.s * self.p,
                self.n
            )));
        }
        Ok(())
    }

    /// Exponent n + sp of the kernel.
    pub fn kernel_exponent(&self) -> f64 {
        self.n as f64 + self.s * self.p
    }
}

/// One dyadic shell θ ∈ [theta_lo, theta_hi) of the estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub index: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub s: f64,
    pub p: f64,
    pub n: usize,
    pub region: Region,
    pub seed: u64,
    pub strata: Vec<Stratum>,
    /// Bound on the unsampled contribution of the innermost ball, from the
    /// map's Lipschitz hint. Not included in `value`.
    pub remainder_bound: Option<f64>,
}

impl EnergyEstimate {
    pub fn params(&self) -> EnergyParams {
        EnergyParams { s: self.s, p: self.p, n: self.n, critical: false }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// √(Σ σᵢ²)
pub fn combined_se(ses: &[f64]) -> f64 {
    ses.iter().map(|s| s * s).sum::<f64>().sqrt()
}

/// |a − b| ≤ k·√(σ_a² + σ_b²).
pub fn agree_within(a: &EnergyEstimate, b: &EnergyEstimate, k: f64) -> bool {
    (a.value - b.value).abs() <= k * combined_se(&[a.std_error, b.std_error])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(EnergyParams::new(0.0, 3.0, 3).is_err());
        assert!(EnergyParams::new(0.5, 1.0, 3).is_err());
        assert!(EnergyParams::new(0.5, 3.0, 4).is_err());
        let c = EnergyParams::critical(0.5, 3).unwrap();
        assert_eq!(c.p, 6.0);
        c.validate().unwrap();
        let bad = EnergyParams { p: 5.0, ..c };
        assert!(bad.validate().is_err());
        assert!(EnergyParams { critical: false, ..bad }.validate().is_ok());
    }
}
