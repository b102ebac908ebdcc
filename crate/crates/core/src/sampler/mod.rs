//! Posterior sampling by adaptive Metropolis-within-Gibbs.

pub mod chain;
pub mod checkpoint;
pub mod config;
pub mod diagnostics;
pub mod geweke;
pub mod params;

use rayon::prelude::*;

pub use chain::{chain_rng, run_chain, Chain};
pub use checkpoint::{read_draws, write_draws, write_draws_csv};
pub use config::McmcConfig;
pub use diagnostics::{Diagnostics, ParamDiagnostics};
pub use geweke::{geweke_joint_test, GewekeMoment};
pub use params::{Param, Transform};

use crate::error::Result;
use crate::model::{Dims, Hyperconfig, ModelState, Observations};

/// Pooled retained draws of all chains, in chain order.
#[derive(Debug, Clone)]
pub struct PosteriorDraws {
    pub dims: Dims,
    pub draws: Vec<ModelState>,
    pub chain_id: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl PosteriorDraws {
    /// Pools draws and computes diagnostics. Chains are grouped by id and
    /// must have equal length for R-hat.
    pub fn new(dims: Dims, draws: Vec<ModelState>, chain_id: Vec<usize>) -> Self {
        assert_eq!(draws.len(), chain_id.len());
        let mut ids: Vec<usize> = chain_id.clone();
        ids.sort_unstable();
        ids.dedup();
        let per_chain: Vec<Vec<Vec<f64>>> = ids
            .iter()
            .map(|id| {
                draws
                    .iter()
                    .zip(&chain_id)
                    .filter(|(_, c)| *c == id)
                    .map(|(d, _)| d.to_flat())
                    .collect()
            })
            .collect();
        let diagnostics = if draws.is_empty() {
            Diagnostics::default()
        } else {
            Diagnostics::compute(&ModelState::names(dims), &per_chain)
        };
        PosteriorDraws { dims, draws, chain_id, diagnostics }
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn n_chains(&self) -> usize {
        let mut ids = self.chain_id.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

/// Runs `cfg.n_chains` independent chains in parallel and pools them.
pub fn run_chains(obs: &Observations, hyper: &Hyperconfig, cfg: &McmcConfig) -> Result<PosteriorDraws> {
    cfg.validate()?;
    let chains: Vec<Vec<ModelState>> = (0..cfg.n_chains as u64)
        .into_par_iter()
        .map(|c| run_chain(obs, hyper, cfg, c))
        .collect::<Result<_>>()?;
    let mut draws = Vec::with_capacity(cfg.total_draws());
    let mut chain_id = Vec::with_capacity(cfg.total_draws());
    for (c, states) in chains.into_iter().enumerate() {
        chain_id.extend(std::iter::repeat_n(c, states.len()));
        draws.extend(states);
    }
    let pooled = PosteriorDraws::new(obs.dims, draws, chain_id);
    for w in &pooled.diagnostics.warnings {
        log::warn!("{w}");
    }
    Ok(pooled)
}
