//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use yukawa_core::bounds::VerifySettings;
use yukawa_core::{Params, Refinement, Settings};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub model: Params,
    #[serde(default)]
    pub solver: Settings,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub converge: ConvergeConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Coupling grid of `scan-kappa`: either an explicit list or a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<KappaRange>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            kappas: None,
            range: Some(KappaRange {
                start: 0.0,
                stop: 1.0,
                steps: 10,
            }),
        }
    }
}

/// `steps + 1` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl ScanConfig {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let grid = match (&self.kappas, &self.range) {
            (Some(_), Some(_)) => return Err(CliError::config("scan: give either `kappas` or `range`, not both")),
            (Some(k), None) => k.clone(),
            (None, Some(r)) => {
                if r.steps == 0 {
                    vec![r.start]
                } else {
                    (0..=r.steps)
                        .map(|i| r.start + (r.stop - r.start) * i as f64 / r.steps as f64)
                        .collect()
                }
            }
            (None, None) => Vec::new(),
        };
        if grid.is_empty() {
            return Err(CliError::config("scan.kappas: the coupling grid is empty"));
        }
        if let Some(k) = grid.iter().find(|k| !k.is_finite()) {
            return Err(CliError::config(format!("scan.kappas: non-finite coupling {k}")));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub refinement: Refinement<f64>,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            refinement: Refinement::BosonCap {
                values: vec![1, 2, 3, 4],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default = "default_max_basis_states")]
    pub max_basis_states: usize,
    #[serde(default = "default_test_functions")]
    pub test_functions: usize,
    #[serde(default = "default_positions")]
    pub positions: usize,
    #[serde(default = "default_verify_dense_cap")]
    pub dense_cap: usize,
    #[serde(default = "default_decades")]
    pub epsilon_decades: [i32; 2],
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    VerifySettings::default().sample_count
}

fn default_max_basis_states() -> usize {
    VerifySettings::default().max_basis_states
}

fn default_test_functions() -> usize {
    VerifySettings::default().test_functions
}

fn default_positions() -> usize {
    VerifySettings::default().positions
}

fn default_verify_dense_cap() -> usize {
    VerifySettings::default().dense_cap
}

fn default_decades() -> [i32; 2] {
    let (lo, hi) = VerifySettings::default().epsilon_decades;
    [lo, hi]
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            sample_count: default_samples(),
            max_basis_states: default_max_basis_states(),
            test_functions: default_test_functions(),
            positions: default_positions(),
            dense_cap: default_verify_dense_cap(),
            epsilon_decades: default_decades(),
            seed: 0,
        }
    }
}

impl VerifyConfig {
    pub fn settings(&self) -> VerifySettings {
        VerifySettings {
            sample_count: self.sample_count,
            max_basis_states: self.max_basis_states,
            test_functions: self.test_functions,
            positions: self.positions,
            dense_cap: self.dense_cap,
            epsilon_decades: (self.epsilon_decades[0], self.epsilon_decades[1]),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for outputs when `--out` is not given. `YUKAWA_OUT_DIR`
    /// takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Everything that can be checked without building a basis.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            )));
        }
        self.model.validate()?;
        self.solver.validate()?;
        if self.verify.sample_count == 0 {
            return Err(CliError::config("verify.sample_count: must be at least 1"));
        }
        if self.verify.epsilon_decades[0] > self.verify.epsilon_decades[1] {
            return Err(CliError::config("verify.epsilon_decades: lower decade above upper"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_parse() {
        for text in [
            include_str!("../../../configs/minimal.toml"),
            include_str!("../../../configs/two_point.toml"),
        ] {
            RunConfig::parse(text).unwrap();
        }
    }

    #[test]
    fn default_grid_has_eleven_points() {
        let grid = ScanConfig::default().grid().unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!((grid[0], grid[10]), (0.0, 1.0));
    }

    #[test]
    fn grid_needs_exactly_one_source() {
        let both = ScanConfig {
            kappas: Some(vec![0.0]),
            range: Some(KappaRange {
                start: 0.0,
                stop: 1.0,
                steps: 1,
            }),
        };
        assert!(both.grid().is_err());
        assert!(ScanConfig {
            kappas: None,
            range: None
        }
        .grid()
        .is_err());
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = "schema_version = 2\n[model]\ndirac_mass = 1.0\nboson_mass = 1.0\ncoupling = 0.0\n";
        assert!(matches!(RunConfig::parse(text), Err(CliError::Config(m)) if m.contains("schema_version")));
    }

    #[test]
    fn resolved_config_round_trips() {
        let config = RunConfig::parse(include_str!("../../../configs/two_point.toml")).unwrap();
        let text = toml::to_string(&config).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), config);
    }
}
