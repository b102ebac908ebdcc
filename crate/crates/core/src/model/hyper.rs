use serde::{Deserialize, Serialize};

use crate::error::{DanteError, Result};

/// Fixed hyperparameters of the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperconfig {
    /// Shape of every Gamma hyperprior on precisions and Beta shapes.
    pub gamma_shape: f64,
    /// Rate of every Gamma hyperprior.
    pub gamma_rate: f64,
    /// Degrees of freedom of the half-t and truncated-t priors.
    pub t_dof: f64,
    /// Variance of the half-Normal prior on `var_interaction_mean`.
    pub var_interaction_mean_prior_var: f64,
    /// Lower bound applied to both Beta shape arguments of the likelihood.
    pub beta_floor: f64,
}

impl Default for Hyperconfig {
    fn default() -> Self {
        Hyperconfig {
            gamma_shape: 5.0,
            gamma_rate: 5.0,
            t_dof: 3.0,
            var_interaction_mean_prior_var: 0.05,
            beta_floor: 1e-8,
        }
    }
}

impl Hyperconfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_shape", self.gamma_shape),
            ("gamma_rate", self.gamma_rate),
            ("t_dof", self.t_dof),
            ("var_interaction_mean_prior_var", self.var_interaction_mean_prior_var),
            ("beta_floor", self.beta_floor),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DanteError::Config(format!("model.{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}
