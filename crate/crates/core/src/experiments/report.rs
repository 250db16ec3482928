use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Format, ScalingResult};
use crate::error::Result;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub config_hash: String,
    pub partial: bool,
}

impl Metadata {
    pub fn of(result: &ScalingResult) -> Self {
        Self {
            version: REPORT_VERSION.to_string(),
            config_hash: result.config.config_hash(),
            partial: result.partial,
        }
    }
}

/// The JSON artifact: metadata header, then the full result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub metadata: Metadata,
    pub result: ScalingResult,
}

/// Paths written by [`emit_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    pub main: PathBuf,
    /// Two columns, log d and log energy.
    pub companion: PathBuf,
    /// Metadata sidecar, written next to CSV output.
    pub metadata: Option<PathBuf>,
}

#[derive(Serialize)]
struct CsvRow {
    d: i64,
    energy: f64,
    std_error: f64,
    n_samples: u64,
    s: f64,
    p: f64,
    seed: u64,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

pub fn companion_path(path: &Path) -> PathBuf {
    with_suffix(path, ".loglog.dat")
}

pub fn metadata_path(path: &Path) -> PathBuf {
    with_suffix(path, ".meta.json")
}

fn write_csv(result: &ScalingResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in &result.rows {
        let e = &r.energy;
        w.serialize(CsvRow {
            d: r.d,
            energy: e.value,
            std_error: e.std_error,
            n_samples: e.n_samples,
            s: e.s,
            p: e.p,
            seed: e.seed,
        })?;
    }
    if result.rows.is_empty() {
        w.write_record(["d", "energy", "std_error", "n_samples", "s", "p", "seed"])?;
    }
    w.flush()?;
    Ok(())
}

fn write_companion(result: &ScalingResult, meta: &Metadata, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "# config_hash {} partial {}", meta.config_hash, meta.partial)?;
    writeln!(out, "# log_d log_energy")?;
    for r in result.rows.iter().filter(|r| r.d != 0 && r.energy.value > 0.0) {
        writeln!(out, "{} {}", (r.d.unsigned_abs() as f64).ln(), r.energy.value.ln())?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes `path` in the requested format plus the plot companion; CSV
/// output also gets a metadata sidecar since its columns are fixed.
pub fn emit_report(result: &ScalingResult, format: Format, path: &Path) -> Result<ReportFiles> {
    let meta = Metadata::of(result);
    let mut files = ReportFiles { main: path.to_path_buf(), companion: companion_path(path), metadata: None };
    match format {
        Format::Csv => {
            write_csv(result, path)?;
            let sidecar = metadata_path(path);
            fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
            files.metadata = Some(sidecar);
        }
        Format::Json => {
            let report = JsonReport { metadata: meta.clone(), result: result.clone() };
            fs::write(path, serde_json::to_string_pretty(&report)?)?;
        }
    }
    write_companion(result, &meta, &files.companion)?;
    Ok(files)
}

pub fn read_json_report(path: &Path) -> Result<JsonReport> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
