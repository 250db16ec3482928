//! The scaling experiment E(u_d) against |d|, the verification suite, and
//! report files.

mod config;
mod report;
mod scaling;
mod verify;

pub use config::{DegreeSpec, ExperimentConfig, Format, DEFAULT_DEGREES, DEFAULT_SAMPLES, DEFAULT_SEED};
pub use report::{
    companion_path, emit_report, metadata_path, read_json_report, JsonReport, Metadata, ReportFiles, REPORT_VERSION,
};
pub use scaling::{degree_seed, fit_loglog, run_scaling, run_scaling_with, LogLogFit, ScalingResult, ScalingRow};
pub use verify::{run_check, run_verify, CheckId, CheckOutcome, Tolerances, VerifyConfig, VerifyReport};
