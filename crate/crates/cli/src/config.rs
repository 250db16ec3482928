use std::path::{Path, PathBuf};

use hopflab_core::experiments::{ExperimentConfig, VerifyConfig};
use serde::Deserialize;

/// Names the config file when `--config` is absent.
pub const CONFIG_ENV: &str = "HOPFLAB_CONFIG";

/// A TOML file with optional `[scaling]` and `[verify]` tables.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub scaling: ExperimentConfig,
    pub verify: VerifyConfig,
}

pub fn config_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
}

pub fn load(flag: Option<&Path>) -> Result<FileConfig, String> {
    let Some(path) = config_path(flag) else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hopflab_core::experiments::{CheckId, DegreeSpec};

    #[test]
    fn sections_are_optional() {
        let c: FileConfig = toml::from_str("").unwrap();
        assert_eq!(c.scaling, ExperimentConfig::default());
        let c: FileConfig = toml::from_str(
            "[scaling]\ns = 0.8\ndegrees = \"kmax:3\"\n[verify]\nchecks = [\"gluing\"]\n[verify.tolerances]\ndegree_residual = 0.01\n",
        )
        .unwrap();
        assert_eq!(c.scaling.s, 0.8);
        assert_eq!(c.scaling.degrees, DegreeSpec::KMax(3));
        assert_eq!(c.verify.checks, vec![CheckId::Gluing]);
        assert_eq!(c.verify.tolerances.degree_residual, 0.01);
        assert_eq!(c.verify.tolerances.hopf_residual, 0.05);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[scaling]\nsamples = 5\n").is_err());
        assert!(toml::from_str::<FileConfig>("[other]\n").is_err());
    }
}
