use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::energy::{energy_mc, EnergyEstimate, Region};
use crate::error::Result;
use crate::maps::prescribed_hopf_map;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub d: i64,
    pub energy: EnergyEstimate,
}

/// Least-squares fit of log E against log |d| over the rows with |d| ≥ 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    /// Propagated from the per-row standard errors.
    pub slope_stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub config: ExperimentConfig,
    /// Sorted by d.
    pub rows: Vec<ScalingRow>,
    /// `None` with fewer than two usable rows.
    pub fit: Option<LogLogFit>,
    /// Set when a degree failed; `rows` holds what finished before it.
    pub partial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl ScalingResult {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

/// Independent stream for each degree.
pub fn degree_seed(seed: u64, d: i64) -> u64 {
    seed ^ (d as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn fit_loglog(rows: &[ScalingRow]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.d.unsigned_abs() >= 2 && r.energy.value > 0.0)
        .map(|r| {
            let e = &r.energy;
            ((r.d.unsigned_abs() as f64).ln(), e.value.ln(), e.std_error / e.value)
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let var: f64 = pts.iter().map(|p| ((p.0 - mx) / sxx).powi(2) * p.2 * p.2).sum();
    Some(LogLogFit { slope, slope_stderr: var.sqrt(), intercept: my - slope * mx, points: pts.len() })
}

pub fn run_scaling(config: &ExperimentConfig) -> Result<ScalingResult> {
    run_scaling_with(config, |_| {})
}

/// As [`run_scaling`], calling `on_row` after each finished degree.
pub fn run_scaling_with(config: &ExperimentConfig, mut on_row: impl FnMut(&ScalingRow)) -> Result<ScalingResult> {
    config.validate()?;
    let params = config.params()?;
    let mut rows = Vec::new();
    let mut failure = None;
    for d in config.degrees() {
        let estimate = prescribed_hopf_map(d).and_then(|u| {
            energy_mc(&u, &params, &Region::Whole, config.samples_per_estimate, degree_seed(config.seed, d))
        });
        match estimate {
            Ok(energy) => {
                let row = ScalingRow { d, energy };
                on_row(&row);
                rows.push(row);
            }
            Err(e) => {
                failure = Some(format!("degree {d}: {e}"));
                break;
            }
        }
    }
    Ok(ScalingResult {
        config: config.clone(),
        fit: fit_loglog(&rows),
        rows,
        partial: failure.is_some(),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::DegreeSpec;

    fn row(d: i64, value: f64) -> ScalingRow {
        let energy = EnergyEstimate {
            value,
            std_error: 0.01 * value,
            n_samples: 1000,
            s: 0.5,
            p: 6.0,
            n: 3,
            region: Region::Whole,
            seed: 0,
            strata: Vec::new(),
            remainder_bound: None,
        };
        ScalingRow { d, energy }
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let rows: Vec<ScalingRow> = [1, 4, 9, 16, 25].iter().map(|&d| row(d, 7.0 * (d as f64).powf(0.75))).collect();
        let fit = fit_loglog(&rows).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-12);
        assert_eq!(fit.points, 4);
        assert!(fit.slope_stderr > 0.0);
    }

    #[test]
    fn one_row_has_no_slope() {
        assert!(fit_loglog(&[row(1, 5.0)]).is_none());
        assert!(fit_loglog(&[row(1, 5.0), row(4, 9.0)]).is_none());
    }

    #[test]
    fn seeds_differ_per_degree() {
        assert_eq!(degree_seed(7, 0), 7);
        assert_ne!(degree_seed(7, 4), degree_seed(7, 9));
    }

    #[test]
    fn small_run_is_deterministic() {
        let config = ExperimentConfig { degrees: DegreeSpec::List(vec![4, 1]), samples_per_estimate: 5000, ..Default::default() };
        let a = run_scaling(&config).unwrap();
        let b = run_scaling(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.iter().map(|r| r.d).collect::<Vec<_>>(), vec![1, 4]);
        assert!(!a.partial && a.fit.is_none());
    }
}
