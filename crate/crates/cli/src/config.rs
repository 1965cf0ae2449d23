// SPDX-License-Identifier: Apache-2.0

//! JSON run configuration.

use std::path::Path;

use condosc_core::gate::MatchingIndices;
use condosc_core::oracle::{IntegrationConfig, SpectroscopyConfig};
use condosc_core::static_dynamics::InitialAmplitudes;
use condosc_core::sweep::{Backend, SweepSpec};
use condosc_core::{Drive, ResonanceBranch, SystemParams};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_260_419;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<condosc_core::Error> for ConfigError {
    fn from(e: condosc_core::Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// Inclusive time window sampled at `points` evenly spaced instants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.t_start.is_finite() || !self.t_end.is_finite() || self.t_start < 0.0 || self.t_end < self.t_start {
            return Err(ConfigError::Invalid(format!(
                "time range must satisfy 0 <= t_start <= t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.points == 0 {
            return Err(ConfigError::Invalid("time grid needs at least one point".into()));
        }
        Ok(())
    }

    /// A zero-length window yields a single instant.
    pub fn times(&self) -> Vec<f64> {
        if self.t_end == self.t_start || self.points == 1 {
            return vec![self.t_start];
        }
        let step = (self.t_end - self.t_start) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.t_start + k as f64 * step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticTraceConfig {
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    #[serde(default = "target_down")]
    pub init: InitialAmplitudes,
}

impl StaticTraceConfig {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid { t_start: self.t_start, t_end: self.t_end, points: self.points }
    }
}

fn target_down() -> InitialAmplitudes {
    InitialAmplitudes::DOWN
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncConfig {
    pub n: u32,
    pub l: u32,
    #[serde(default = "one")]
    pub m: u32,
    #[serde(default = "plus")]
    pub branch: ResonanceBranch,
}

impl SyncConfig {
    pub fn indices(&self) -> MatchingIndices {
        MatchingIndices { n: self.n, l: self.l, m: self.m }
    }
}

fn one() -> u32 {
    1
}

fn plus() -> ResonanceBranch {
    ResonanceBranch::Plus
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateTolerances {
    /// Static closed form against the 2×2 propagator.
    pub static_closed_form: f64,
    /// Static closed form against the integrated 4×4 evolution.
    pub static_oracle: f64,
    /// Relative gap between the synchronised amplitude and its root-finder value.
    pub matching_root: f64,
    /// Propagator unitarity.
    pub unitarity: f64,
    /// RWA flip probability against exact evolution over one Rabi period.
    pub rwa_agreement: f64,
}

impl Default for ValidateTolerances {
    fn default() -> Self {
        Self {
            static_closed_form: 1e-12,
            static_oracle: 1e-8,
            matching_root: 1e-10,
            unitarity: 1e-12,
            rwa_agreement: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub random_cases: usize,
    pub samples: usize,
    pub tolerances: ValidateTolerances,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { random_cases: 200, samples: 200, tolerances: ValidateTolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    #[serde(default = "no_drive")]
    pub drive: Drive,
    #[serde(default)]
    pub backend: Option<Backend>,
    #[serde(default)]
    pub static_trace: Option<StaticTraceConfig>,
    #[serde(default)]
    pub rwa_trace: Option<TimeGrid>,
    #[serde(default)]
    pub sync: Option<SyncConfig>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub validate: Option<ValidateConfig>,
    #[serde(default)]
    pub spectroscopy: Option<SpectroscopyConfig>,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn no_drive() -> Drive {
    Drive::ZERO
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Checks every section that is present, before any computation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.system.validate()?;
        self.drive.validate()?;
        self.integration.validate()?;
        if let Some(st) = &self.static_trace {
            st.grid().validate()?;
            st.init.validate()?;
        }
        if let Some(grid) = &self.rwa_trace {
            grid.validate()?;
        }
        if let Some(sync) = &self.sync {
            sync.indices().validate()?;
        }
        if let Some(spec) = &self.sweep {
            spec.validate()?;
        }
        if let Some(v) = &self.validate {
            if v.samples < 2 {
                return Err(ConfigError::Invalid("validate.samples must be at least 2".into()));
            }
            let t = v.tolerances;
            let all = [t.static_closed_form, t.static_oracle, t.matching_root, t.unitarity, t.rwa_agreement];
            if all.iter().any(|x| !(*x >= 0.0)) {
                return Err(ConfigError::Invalid("validate tolerances must be non-negative".into()));
            }
        }
        Ok(())
    }

    pub fn section<'a, T>(&self, value: &'a Option<T>, name: &str) -> Result<&'a T, ConfigError> {
        value.as_ref().ok_or_else(|| ConfigError::Invalid(format!("missing `{name}` section")))
    }
}
