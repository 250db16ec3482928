//! Acceptance criteria 1-10 at full tolerances; one line per criterion.
//! Run with `cargo test -p hopflab-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use hopflab_core::experiments::{run_check, run_scaling, CheckId, DegreeSpec, ExperimentConfig, VerifyConfig};

const SLOPE_BAND: (f64, f64) = (0.55, 0.90);

fn line(n: usize, name: &str, passed: bool, detail: &str, seconds: f64) -> bool {
    println!("criterion {n:>2} {name:<22} {} {detail} ({seconds:.1}s)", if passed { "PASS" } else { "FAIL" });
    passed
}

fn scaling_criterion() -> bool {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for s in [0.5, 0.8] {
        let config = ExperimentConfig {
            s,
            degrees: DegreeSpec::List(vec![1, 4, 9, 16, 25]),
            samples_per_estimate: 1_000_000,
            ..Default::default()
        };
        match run_scaling(&config) {
            Ok(r) if !r.partial => match r.fit {
                Some(f) => {
                    ok &= (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&f.slope);
                    parts.push(format!("s = {s}: slope {:.3} ± {:.3}", f.slope, f.slope_stderr));
                }
                None => {
                    ok = false;
                    parts.push(format!("s = {s}: no fit"));
                }
            },
            Ok(r) => {
                ok = false;
                parts.push(format!("s = {s}: partial ({})", r.failure.unwrap_or_default()));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("s = {s}: {e}"));
            }
        }
    }
    let detail = format!("{}; band [{}, {}]", parts.join(", "), SLOPE_BAND.0, SLOPE_BAND.1);
    line(10, "scaling-law", ok, &detail, start.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    let config = VerifyConfig::default();
    let mut all = true;
    for id in CheckId::ALL {
        let o = run_check(id, &config);
        all &= line(o.number, id.name(), o.passed, &format!("{} [need {}]", o.measured, o.criterion), o.seconds);
    }
    all &= scaling_criterion();
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
