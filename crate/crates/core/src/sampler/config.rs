use serde::{Deserialize, Serialize};

use crate::error::{DanteError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    pub n_chains: usize,
    /// Sweeps per chain, including burn-in.
    pub n_iterations: usize,
    pub thin: usize,
    /// Thinned draws discarded from the start of each chain.
    pub burnin_thinned: usize,
    pub seed: u64,
    /// Acceptance rate targeted by step-size adaptation during burn-in.
    pub target_accept: f64,
    /// Sweeps per adaptation batch.
    pub adapt_window: usize,
    /// Adds an independence update of each whole walk drawn from its prior
    /// conditional after every sweep.
    pub block_walks: bool,
    /// Include the change-of-variables term for transformed parameters.
    /// Only ever disabled to check that the sampler tests detect the bug.
    #[doc(hidden)]
    pub jacobian_correction: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            n_chains: 3,
            n_iterations: 30_000,
            thin: 10,
            burnin_thinned: 1_500,
            seed: 1,
            target_accept: 0.44,
            adapt_window: 50,
            block_walks: false,
            jacobian_correction: true,
        }
    }
}

impl McmcConfig {
    /// Retained draws per chain.
    pub fn retained_per_chain(&self) -> usize {
        (self.n_iterations / self.thin).saturating_sub(self.burnin_thinned)
    }

    pub fn total_draws(&self) -> usize {
        self.n_chains * self.retained_per_chain()
    }

    /// Sweeps during which step sizes adapt.
    pub fn burnin_sweeps(&self) -> usize {
        self.burnin_thinned * self.thin
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_chains == 0 || self.thin == 0 || self.adapt_window == 0 {
            return Err(DanteError::Config(
                "mcmc.n_chains, mcmc.thin and mcmc.adapt_window must be positive".into(),
            ));
        }
        if self.retained_per_chain() == 0 {
            return Err(DanteError::Config(format!(
                "mcmc: {} iterations thinned by {} leave nothing after {} burn-in draws",
                self.n_iterations, self.thin, self.burnin_thinned
            )));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(DanteError::Config("mcmc.target_accept must lie in (0, 1)".into()));
        }
        Ok(())
    }
}
