//! The state-level hierarchical model: parameter state, densities,
//! likelihood, prior and forward simulation.

pub mod density;
pub mod hyper;
pub mod likelihood;
pub mod observations;
pub mod prior;
pub mod simulate;
pub mod state;

pub use hyper::Hyperconfig;
pub use likelihood::log_likelihood;
pub use observations::Observations;
pub use prior::{log_joint, log_prior};
pub use simulate::{sample_prior, sample_prior_with, simulate_observations, PriorOverrides};
pub use state::{Dims, ModelState};

/// Inverse-logit of the four-component sum at `(r, s, t)`.
pub fn theta_of(state: &ModelState, r: usize, s: usize, t: usize) -> f64 {
    state.theta(r, s, t)
}
