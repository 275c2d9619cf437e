//! Run configuration files.
//!
//! A [`RunConfig`] is a JSON document with a `model` and optional Monte
//! Carlo, ladder, grid and sampling settings. Unknown keys are rejected at
//! every level. The schema is published at `docs/schemas/run_config.schema.json`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::MCConfig;
use crate::price::PriceModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSettings {
    pub replications: usize,
    pub scale: f64,
    pub horizon: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self { replications: 500, scale: 2.0e5, horizon: 1.0 }
    }
}

/// Sampling grid for the per-day SD tables: `samples_per_day` windows per
/// session, evenly spaced over the session hours, for each horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub horizons_minutes: Vec<f64>,
    pub samples_per_day: usize,
    /// Optional explicit window starts in seconds since session start.
    /// Overrides the even spacing.
    pub starts: Option<Vec<f64>>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { horizons_minutes: vec![10.0, 5.0, 20.0], samples_per_day: 7, starts: None }
    }
}

impl SamplingConfig {
    /// Window starts for a session of the given length and horizon.
    pub fn window_starts(&self, session_length: f64, horizon_seconds: f64) -> Result<Vec<f64>> {
        if let Some(starts) = &self.starts {
            return Ok(starts.clone());
        }
        if self.samples_per_day == 0 {
            return Err(Error::Config("samples_per_day must be >= 1".into()));
        }
        let span = session_length - horizon_seconds;
        if span < 0.0 {
            return Err(Error::Data(format!(
                "session of {session_length} s is shorter than the {horizon_seconds} s sampling horizon"
            )));
        }
        let k = self.samples_per_day as f64;
        Ok((0..self.samples_per_day).map(|i| span * (i as f64 + 0.5) / k).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: PriceModel,
    #[serde(default)]
    pub mc: McSettings,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Window length for `simulate`.
    #[serde(default)]
    pub window: Option<f64>,
    /// Grid for `bands`.
    #[serde(default)]
    pub time_grid: Option<Vec<f64>>,
    /// Scales for `verify-lln`.
    #[serde(default)]
    pub ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma_oracle_steps: Option<usize>,
    #[serde(default)]
    pub sampling: SamplingConfig,
}

fn default_seed() -> u64 {
    1
}

impl RunConfig {
    pub fn new(model: PriceModel) -> Self {
        Self {
            model,
            mc: McSettings::default(),
            seed: default_seed(),
            output_dir: None,
            window: None,
            time_grid: None,
            ladder: None,
            sigma_oracle_steps: None,
            sampling: SamplingConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => Error::Config(format!("{}: {other}", path.display())),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.mc_config(None, None).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(w) = self.window {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Config(format!("window must be > 0, got {w}")));
            }
        }
        if let Some(l) = &self.ladder {
            if l.is_empty() || l.iter().any(|n| !(n.is_finite() && *n >= 1.0)) {
                return Err(Error::Config("ladder scales must be >= 1".into()));
            }
        }
        if let Some(g) = &self.time_grid {
            if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) || g.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::Config("time_grid must be non-empty, non-negative and strictly increasing".into()));
            }
        }
        Ok(())
    }

    /// Monte Carlo settings with optional seed and replication overrides.
    pub fn mc_config(&self, seed: Option<u64>, workers: Option<usize>) -> Result<MCConfig> {
        let c = MCConfig::new(self.mc.replications, self.mc.scale, self.mc.horizon, seed.unwrap_or(self.seed))?;
        Ok(c.with_workers(workers))
    }
}
