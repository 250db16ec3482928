use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::energy::{EnergyParams, MIN_SAMPLES};
use crate::error::{Error, Result};

/// Perfect squares k² for k = 1…5 and the non-squares 2, 5, 7.
pub const DEFAULT_DEGREES: [i64; 8] = [1, 2, 4, 5, 7, 9, 16, 25];
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5EED;

/// An explicit degree list, or every k² with 1 ≤ k ≤ kmax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DegreeSpec {
    List(Vec<i64>),
    KMax(u32),
}

impl DegreeSpec {
    /// Sorted, without repeats.
    pub fn degrees(&self) -> Vec<i64> {
        let mut out = match self {
            Self::List(v) => v.clone(),
            Self::KMax(k) => (1..=i64::from(*k)).map(|k| k * k).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Default for DegreeSpec {
    fn default() -> Self {
        Self::List(DEFAULT_DEGREES.to_vec())
    }
}

impl FromStr for DegreeSpec {
    type Err = Error;
    /// `"1,4,9"` or `"kmax:5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(k) = s.strip_prefix("kmax:") {
            let k = k.trim().parse().map_err(|_| Error::Parameter(format!("bad kmax in {s:?}")))?;
            return Ok(Self::KMax(k));
        }
        let list = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parameter(format!("bad degree {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::List(list))
    }
}

impl fmt::Display for DegreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::KMax(k) => write!(f, "kmax:{k}"),
            Self::List(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl TryFrom<String> for DegreeSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DegreeSpec> for String {
    fn from(d: DegreeSpec) -> String {
        d.to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Parameter(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub s: f64,
    /// Defaults to 3/s.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub degrees: DegreeSpec,
    pub samples_per_estimate: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            s: 0.5,
            p: None,
            degrees: DegreeSpec::default(),
            samples_per_estimate: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            output_path: None,
            format: Format::Csv,
        }
    }
}

/// The fields that determine the numbers, for hashing.
#[derive(Serialize)]
struct HashedFields<'a> {
    s: f64,
    p: f64,
    degrees: &'a [i64],
    samples_per_estimate: usize,
    seed: u64,
}

impl ExperimentConfig {
    pub fn p(&self) -> f64 {
        self.p.unwrap_or(3.0 / self.s)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.degrees.degrees()
    }

    /// Energy parameters on S³; critical when p was left at its default.
    pub fn params(&self) -> Result<EnergyParams> {
        match self.p {
            None => EnergyParams::critical(self.s, 3),
            Some(p) => EnergyParams::new(self.s, p, 3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.samples_per_estimate < MIN_SAMPLES {
            return Err(Error::TooFewSamples { got: self.samples_per_estimate, min: MIN_SAMPLES });
        }
        if self.degrees().is_empty() {
            return Err(Error::Parameter("the degree list is empty".into()));
        }
        Ok(())
    }

    /// SHA-256 of the numeric configuration; output location and format
    /// do not enter.
    pub fn config_hash(&self) -> String {
        let fields = HashedFields {
            s: self.s,
            p: self.p(),
            degrees: &self.degrees(),
            samples_per_estimate: self.samples_per_estimate,
            seed: self.seed,
        };
        let json = serde_json::to_vec(&fields).expect("plain fields serialize");
        hex::encode(Sha256::digest(json))
    }
}
