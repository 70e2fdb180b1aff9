//! JSON configuration shared by the command-line tool.
//!
//! ```json
//! {
//!   "gen": { "d": 200, "n": 180, "M": 20, "K": 3, "alpha": 0.0, "sigma": 1.0,
//!            "theta_min": 0.3, "master_seed": 7 },
//!   "experiment": { "theta_min_grid": [0.1, 0.2], "trials": 100,
//!                   "algorithms": ["single", "ds:3", "dj", "djf:20"] },
//!   "theory": { "d": 2000, "K": 3, "n": 1800, "sigma": 1.0, "mu_max": 0.05,
//!               "theta_min_scaled": 12.0, "epsilon": 0.4 },
//!   "machines_available": 70
//! }
//! ```
//!
//! Every section is optional; each subcommand requires the ones it uses.
//! Unknown keys are rejected at every level.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::GenConfig;
use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;
use crate::theory::TheoryParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(default)]
    pub gen: Option<GenConfig>,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default)]
    pub theory: Option<TheoryParams>,
    /// Machine count the theory report is checked against; defaults to `gen.M`.
    #[serde(default)]
    pub machines_available: Option<u64>,
}

impl CliConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CliConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.gen {
            g.validate()?;
            if let Some(e) = &self.experiment {
                e.validate(g)?;
            }
        } else if self.experiment.is_some() {
            return Err(Error::InvalidConfig(
                "'experiment' requires a 'gen' section".into(),
            ));
        }
        if let Some(t) = &self.theory {
            t.validate()?;
        }
        Ok(())
    }

    pub fn gen(&self) -> Result<&GenConfig> {
        self.gen
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing 'gen' section".into()))
    }

    pub fn experiment(&self) -> Result<&ExperimentConfig> {
        self.experiment
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing 'experiment' section".into()))
    }

    pub fn theory(&self) -> Result<&TheoryParams> {
        self.theory
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing 'theory' section".into()))
    }

    pub fn machines_available(&self) -> u64 {
        self.machines_available
            .or(self.gen.as_ref().map(|g| g.machines as u64))
            .unwrap_or(0)
    }
}
