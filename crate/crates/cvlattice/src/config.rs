//! Experiment configuration: a TOML file plus `key=value` overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("override '{0}' is not of the form key=value")]
    Override(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// One `[[wavepacket]]` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavepacketConfig {
    pub center: f64,
    pub momentum: f64,
    pub width: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

/// Every recognised key. Absent physics keys fall back to per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub output_dir: Option<PathBuf>,
    /// Reserved; no experiment draws random numbers.
    pub seed: Option<u64>,
    pub threads: Option<usize>,

    pub n_sites: Option<usize>,
    pub spacing: Option<f64>,
    pub mass: Option<f64>,
    pub coupling: Option<f64>,
    pub dt: Option<f64>,
    pub total_time: Option<f64>,
    pub record_stride: Option<u64>,
    pub m_points: Option<usize>,
    pub extent: Option<f64>,
    pub l_trunc: Option<usize>,

    pub hop: Option<String>,
    pub potential: Option<String>,
    pub epsilon: Option<f64>,

    pub impulse_amplitude: Option<f64>,
    pub impulse_site: Option<usize>,
    pub times: Option<Vec<f64>>,
    pub displacement: Option<f64>,
    pub fock_cutoff: Option<usize>,
    #[serde(default)]
    pub wavepacket: Vec<WavepacketConfig>,
    pub write_psi: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads `path` (if any) and applies `key=value` overrides on top.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => fs::read_to_string(p).map_err(|source| ConfigError::Read {
                path: p.to_path_buf(),
                source,
            })?,
            None => String::new(),
        };
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| ConfigError::Override(item.clone()))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Override(item.clone()));
            }
            table.insert(key.to_string(), parse_value(value.trim()));
        }
        let cfg: Self = table.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on which experiment runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if self.record_stride == Some(0) {
            return bad("record_stride must be at least 1".into());
        }
        for (name, v) in [
            ("spacing", self.spacing),
            ("mass", self.mass),
            ("dt", self.dt),
            ("extent", self.extent),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        for (name, v) in [("coupling", self.coupling), ("total_time", self.total_time)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return bad(format!("{name} must be non-negative, got {v}"));
                }
            }
        }
        if let Some(n) = self.n_sites {
            if n < 2 {
                return bad(format!("n_sites must be at least 2, got {n}"));
            }
        }
        if let Some(m) = self.m_points {
            if m < 2 {
                return bad(format!("m_points must be at least 2, got {m}"));
            }
        }
        if let Some(times) = &self.times {
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return bad("times must be finite and non-negative".into());
            }
        }
        for w in &self.wavepacket {
            if !(w.width.is_finite() && w.width > 0.0) {
                return bad(format!("wavepacket width must be positive, got {}", w.width));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// A bare override value is read as TOML when it parses, else as a string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
