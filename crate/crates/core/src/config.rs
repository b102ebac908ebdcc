//! Experiment configuration read from TOML.
//!
//! ```toml
//! [season]
//! start_epiweek = 40
//! length = 35
//!
//! [model]
//! var_interaction_mean_prior_var = 0.05
//!
//! [mcmc]
//! n_chains = 3
//! n_iterations = 30000
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::epidata::SeasonCalendar;
use crate::error::{DanteError, Result};
use crate::model::Hyperconfig;
use crate::sampler::McmcConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeasonConfig {
    pub start_epiweek: u32,
    pub length: usize,
}

impl Default for SeasonConfig {
    fn default() -> Self {
        SeasonConfig {
            start_epiweek: SeasonCalendar::DEFAULT_START_EPIWEEK,
            length: SeasonCalendar::DEFAULT_WEEKS,
        }
    }
}

/// Point prediction used for percent-valued targets in MSE tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PercentPoint {
    #[default]
    Mean,
    Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub model_label: String,
    /// Season start years to forecast; empty means every season but the first two.
    pub seasons: Vec<i32>,
    pub first_nobs: usize,
    pub last_nobs: usize,
    pub hpd_level: f64,
    pub percent_point: PercentPoint,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            model_label: "dante".into(),
            seasons: Vec::new(),
            first_nobs: 5,
            last_nobs: 29,
            hpd_level: 0.9,
            percent_point: PercentPoint::Mean,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub season: SeasonConfig,
    pub model: Hyperconfig,
    pub mcmc: McmcConfig,
    pub evaluation: EvaluationConfig,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| DanteError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DanteError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.mcmc.validate()?;
        if !(1..=53).contains(&self.season.start_epiweek) || self.season.length < 2 {
            return Err(DanteError::Config("season.start_epiweek must be 1..53 and season.length at least 2".into()));
        }
        let e = &self.evaluation;
        if e.first_nobs == 0 || e.first_nobs > e.last_nobs || e.last_nobs >= self.season.length {
            return Err(DanteError::Config(format!(
                "evaluation weeks {}..{} do not fit a {}-week season",
                e.first_nobs, e.last_nobs, self.season.length
            )));
        }
        if !(e.hpd_level > 0.0 && e.hpd_level <= 1.0) {
            return Err(DanteError::Config("evaluation.hpd_level must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn calendar(&self, season_years: Vec<i32>) -> SeasonCalendar {
        SeasonCalendar::new(season_years).with_season_shape(self.season.start_epiweek, self.season.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_reference_setup() {
        let c = Config::from_toml_str("").unwrap();
        assert_eq!(c.mcmc.total_draws(), 4500);
        assert_eq!(c.season.length, 35);
        assert_eq!(c.model.var_interaction_mean_prior_var, 0.05);
    }

    #[test]
    fn sections_override() {
        let c = Config::from_toml_str(
            "[model]\nvar_interaction_mean_prior_var = 20.0\n[mcmc]\nn_chains = 1\nseed = 9\n[evaluation]\npercent_point = \"mode\"\n",
        )
        .unwrap();
        assert_eq!(c.model.var_interaction_mean_prior_var, 20.0);
        assert_eq!(c.mcmc.n_chains, 1);
        assert_eq!(c.mcmc.seed, 9);
        assert_eq!(c.evaluation.percent_point, PercentPoint::Mode);
        assert_eq!(Config::from_toml_str(&c.to_toml_string()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml_str("[mcmc]\nchains = 2\n").is_err());
    }
}
