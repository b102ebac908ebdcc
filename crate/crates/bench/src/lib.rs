//! Fixtures shared by the benchmarks.

use dante_core::epidata::WeightMatrix;
use dante_core::forecast::{Scale, TrajectoryDraws};
use dante_core::model::{sample_prior, simulate_observations, Dims, Hyperconfig, ModelState, Observations};
use dante_core::sampler::chain_rng;

/// A prior draw and fully observed data simulated from it.
pub fn synthetic_fit(dims: Dims, seed: u64) -> (ModelState, Observations) {
    let hyper = Hyperconfig::default();
    let state = sample_prior(&hyper, dims, seed);
    let obs = simulate_observations(&state, &hyper, None, &mut chain_rng(seed, 1));
    (state, obs)
}

/// Five states in each of the ten HHS regions.
pub fn synthetic_weights() -> WeightMatrix {
    let entries: Vec<(String, u8, f64)> = (0..50)
        .map(|i| (format!("S{i:02}"), (i / 5 + 1) as u8, 1.0e6 + 37_000.0 * i as f64))
        .collect();
    WeightMatrix::from_populations(&entries).expect("valid populations")
}

/// Deterministic state trajectories for the states of `weights`.
pub fn synthetic_states(weights: &WeightMatrix, n_weeks: usize, n_draws: usize) -> TrajectoryDraws {
    let n = weights.n_states();
    let values = (0..n * n_weeks * n_draws)
        .map(|k| 0.005 + 0.04 * ((k as f64 * 0.618_034).fract()))
        .collect();
    TrajectoryDraws::from_values(weights.states.clone(), vec![Scale::State; n], n_weeks, n_draws, values)
        .expect("dimensions agree")
}
