use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::IoError;
use crate::cost::CostConfig;
use crate::moo::GAParams;
use crate::placement::DEFAULT_MAX_BITS;
use crate::power_flow::PowerFlowSettings;
use crate::reliability::ReliabilityParams;

/// Everything one run needs. Paths are absolute or relative to the
/// working directory once loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub feeder_file: PathBuf,
    pub output_dir: PathBuf,
    pub cost: CostConfig,
    pub reliability: ReliabilityParams,
    pub powerflow: PowerFlowSettings,
    pub ga: GAParams,
    /// Largest instance `solve --oracle` and `oracle` will enumerate.
    pub oracle_max_bits: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    feeder_file: PathBuf,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(default)]
    cost: CostConfig,
    #[serde(default)]
    reliability: ReliabilityParams,
    #[serde(default)]
    powerflow: PowerFlowSettings,
    #[serde(default)]
    ga: GAParams,
    #[serde(default = "default_max_bits")]
    oracle_max_bits: usize,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

fn default_max_bits() -> usize {
    DEFAULT_MAX_BITS
}

/// Parses TOML; relative paths are resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, IoError> {
    let de = toml::Deserializer::new(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let message = if field.is_empty() || field == "." {
            inner.to_string()
        } else {
            format!("field `{field}`: {inner}")
        };
        IoError::ConfigParse { path: base.into(), message }
    })?;
    let cfg = RunConfig {
        feeder_file: base.join(raw.feeder_file),
        output_dir: base.join(raw.output_dir),
        cost: raw.cost,
        reliability: raw.reliability,
        powerflow: raw.powerflow,
        ga: raw.ga,
        oracle_max_bits: raw.oracle_max_bits,
    };
    cfg.check()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| IoError::ConfigParse { path: path.into(), message: e.to_string() })?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_config(&text, base).map_err(|e| match e {
        IoError::ConfigParse { message, .. } => IoError::ConfigParse { path: path.into(), message },
        other => other,
    })
}

impl RunConfig {
    /// Parameter checks that need no feeder data.
    pub fn check(&self) -> Result<(), IoError> {
        let config = |e: &dyn std::fmt::Display| IoError::Config(e.to_string());
        self.ga.check().map_err(|e| config(&e))?;
        self.reliability.check().map_err(|e| config(&e))?;
        self.powerflow.check().map_err(|e| config(&e))?;
        if self.oracle_max_bits > 30 {
            return Err(IoError::Config("oracle_max_bits must be at most 30".into()));
        }
        Ok(())
    }
}
