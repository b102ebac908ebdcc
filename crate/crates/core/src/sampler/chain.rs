//! One Metropolis-within-Gibbs chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::McmcConfig;
use super::params::{pi_cache, schedule, shift_pi, Blanket, Param};
use crate::error::{DanteError, Result};
use crate::model::density::sample_normal;
use crate::model::likelihood::ln_obs_term;
use crate::model::{log_joint, sample_prior_with, Hyperconfig, ModelState, Observations, PriorOverrides};

const MAX_INIT_ATTEMPTS: usize = 100;
const INITIAL_LOG_STEP: f64 = -1.0;

#[derive(Debug, Clone)]
pub struct Chain<'h> {
    hyper: &'h Hyperconfig,
    cfg: McmcConfig,
    obs: Observations,
    state: ModelState,
    pi: Vec<f64>,
    params: Vec<Param>,
    log_step: Vec<f64>,
    batch_accepts: Vec<u32>,
    batch_sweeps: u32,
    batches_done: u32,
    adapting: bool,
    rng: ChaCha8Rng,
}

/// Chain RNG: one ChaCha stream per chain under a shared seed.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain);
    rng
}

impl<'h> Chain<'h> {
    /// Starts a chain from a prior draw, redrawing while the joint density
    /// is not finite.
    pub fn new(
        obs: Observations,
        hyper: &'h Hyperconfig,
        cfg: &McmcConfig,
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        let dims = obs.dims;
        for _ in 0..MAX_INIT_ATTEMPTS {
            let state = sample_prior_with(hyper, dims, PriorOverrides::default(), &mut rng);
            if matches!(log_joint(&state, &obs, hyper), Ok(lp) if lp.is_finite()) {
                return Ok(Self::from_state(state, obs, hyper, cfg, rng));
            }
        }
        Err(DanteError::Numerical(format!(
            "no initial state with finite log density after {MAX_INIT_ATTEMPTS} prior draws"
        )))
    }

    /// Starts a chain at a given state. Step sizes start untuned and adapt.
    pub fn from_state(
        state: ModelState,
        obs: Observations,
        hyper: &'h Hyperconfig,
        cfg: &McmcConfig,
        rng: ChaCha8Rng,
    ) -> Self {
        let params = schedule(state.dims);
        let n = params.len();
        Chain {
            hyper,
            cfg: *cfg,
            pi: pi_cache(&state),
            obs,
            state,
            params,
            log_step: vec![INITIAL_LOG_STEP; n],
            batch_accepts: vec![0; n],
            batch_sweeps: 0,
            batches_done: 0,
            adapting: true,
            rng,
        }
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn observations(&self) -> &Observations {
        &self.obs
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Replaces the data the chain conditions on.
    pub fn set_observations(&mut self, obs: Observations) {
        assert_eq!(obs.dims, self.obs.dims, "observation dimensions changed");
        self.obs = obs;
    }

    /// Stops step-size adaptation for the rest of the chain.
    pub fn freeze(&mut self) {
        self.adapting = false;
    }

    pub fn is_adapting(&self) -> bool {
        self.adapting
    }

    pub fn step_sizes(&self) -> Vec<f64> {
        self.log_step.iter().map(|l| l.exp()).collect()
    }

    fn blanket(&self) -> Blanket<'_> {
        Blanket { st: &self.state, obs: &self.obs, hyper: self.hyper, pi: &self.pi }
    }

    /// Log Metropolis ratio for moving parameter `p` to `x1`, including the
    /// change-of-variables term on the proposal scale.
    pub fn log_acceptance_ratio(&self, p: Param, x1: f64) -> f64 {
        let x0 = p.get(&self.state);
        let tr = p.transform(&self.state);
        if !tr.admits(x1) {
            return f64::NEG_INFINITY;
        }
        let b = self.blanket();
        let mut ratio = b.log_density(p, x1) - b.log_density(p, x0);
        if self.cfg.jacobian_correction {
            ratio += tr.ln_jacobian(x1) - tr.ln_jacobian(x0);
        }
        if ratio.is_nan() {
            f64::NEG_INFINITY
        } else {
            ratio
        }
    }

    fn update(&mut self, i: usize) -> bool {
        let p = self.params[i];
        let x0 = p.get(&self.state);
        let tr = p.transform(&self.state);
        let eps: f64 = self.rng.sample(StandardNormal);
        let x1 = tr.inverse(tr.forward(x0) + self.log_step[i].exp() * eps);
        let ratio = self.log_acceptance_ratio(p, x1);
        let accept = ratio >= 0.0 || self.rng.random::<f64>().ln() < ratio;
        if accept {
            p.set(&mut self.state, x1);
            if p.is_walk() {
                shift_pi(&mut self.pi, self.state.dims, p, x1 - x0);
            }
        }
        accept
    }

    /// One pass over every scalar parameter, plus whole-walk updates when
    /// enabled. Adapts step sizes at batch boundaries while adapting.
    pub fn sweep(&mut self) {
        for i in 0..self.params.len() {
            if self.update(i) {
                self.batch_accepts[i] += 1;
            }
        }
        if self.cfg.block_walks {
            self.block_walk_updates();
        }
        if self.adapting {
            self.batch_sweeps += 1;
            if self.batch_sweeps as usize >= self.cfg.adapt_window {
                self.adapt();
            }
        } else {
            self.batch_accepts.fill(0);
        }
    }

    fn adapt(&mut self) {
        self.batches_done += 1;
        let gain = (3.0 / f64::from(self.batches_done).sqrt()).min(1.5);
        let n = f64::from(self.batch_sweeps);
        for (ls, acc) in self.log_step.iter_mut().zip(&mut self.batch_accepts) {
            let rate = f64::from(*acc) / n;
            *ls = (*ls + gain * (rate - self.cfg.target_accept)).clamp(-25.0, 5.0);
            *acc = 0;
        }
        self.batch_sweeps = 0;
    }

    fn block_walk_updates(&mut self) {
        let d = self.state.dims;
        let (nr, ns, nt) = (d.r, d.s, d.t);
        let mut proposal = vec![0.0; nt];

        let (v0, v) = (self.state.var_all_init, self.state.var_all);
        forward_walk(&mut self.rng, &mut proposal, 0.0, v0, |_| v);
        let cells: Vec<(usize, usize, usize)> = (0..nr)
            .flat_map(|r| (0..ns).map(move |s| (r, s)))
            .flat_map(|(r, s)| (0..nt).map(move |t| (r, t, d.cell(r, s, t))))
            .collect();
        let current = self.state.mu_all.clone();
        if self.accept_walk(&cells, &current, &proposal) {
            self.state.mu_all.copy_from_slice(&proposal);
        }

        for r in 0..nr {
            let (v0, v) = (self.state.var_state_init, self.state.var_state[r]);
            forward_walk(&mut self.rng, &mut proposal, 0.0, v0, |_| v);
            let cells: Vec<_> = (0..ns)
                .flat_map(|s| (0..nt).map(move |t| (r, t, d.cell(r, s, t))))
                .collect();
            let current = self.state.mu_state[r * nt..(r + 1) * nt].to_vec();
            if self.accept_walk(&cells, &current, &proposal) {
                self.state.mu_state[r * nt..(r + 1) * nt].copy_from_slice(&proposal);
            }
        }

        for s in 0..ns {
            let (v0, v) = (self.state.var_season_init, self.state.var_season);
            reverse_walk(&mut self.rng, &mut proposal, 0.0, 1.0, v0, |_| v);
            let cells: Vec<_> = (0..nr)
                .flat_map(|r| (0..nt).map(move |t| (r, t, d.cell(r, s, t))))
                .collect();
            let current = self.state.mu_season[s * nt..(s + 1) * nt].to_vec();
            if self.accept_walk(&cells, &current, &proposal) {
                self.state.mu_season[s * nt..(s + 1) * nt].copy_from_slice(&proposal);
            }
        }

        for r in 0..nr {
            let eta = self.state.eta_interaction[r];
            let alpha = self.state.alpha_interaction[r];
            let vars = self.state.var_interaction[r * nt..(r + 1) * nt].to_vec();
            for s in 0..ns {
                reverse_walk(&mut self.rng, &mut proposal, eta, alpha, vars[nt - 1], |t| vars[t]);
                let base = d.cell(r, s, 0);
                let cells: Vec<_> = (0..nt).map(|t| (r, t, base + t)).collect();
                let current = self.state.mu_interaction[base..base + nt].to_vec();
                if self.accept_walk(&cells, &current, &proposal) {
                    self.state.mu_interaction[base..base + nt].copy_from_slice(&proposal);
                }
            }
        }
        self.pi = pi_cache(&self.state);
    }

    /// Independence proposal from the walk's prior conditional: the prior
    /// cancels and only the likelihood ratio remains.
    fn accept_walk(
        &mut self,
        cells: &[(usize, usize, usize)],
        current: &[f64],
        proposal: &[f64],
    ) -> bool {
        let floor = self.hyper.beta_floor;
        let mut ratio = 0.0;
        for &(r, t, cell) in cells {
            if let Some((ly, l1y)) = self.obs.logs_at(cell) {
                let lam = self.state.lambda[r];
                let pi = self.pi[cell];
                ratio += ln_obs_term(ly, l1y, lam, pi + proposal[t] - current[t], floor)
                    - ln_obs_term(ly, l1y, lam, pi, floor);
            }
        }
        let accept = !ratio.is_nan() && (ratio >= 0.0 || self.rng.random::<f64>().ln() < ratio);
        if accept {
            for &(_, t, cell) in cells {
                self.pi[cell] += proposal[t] - current[t];
            }
        }
        accept
    }
}

fn forward_walk<R: Rng>(rng: &mut R, out: &mut [f64], mean0: f64, var0: f64, var: impl Fn(usize) -> f64) {
    out[0] = sample_normal(rng, mean0, var0);
    for t in 1..out.len() {
        out[t] = sample_normal(rng, out[t - 1], var(t - 1));
    }
}

/// Walk started at the last week and run backwards: `x[t] ~ N(coef x[t+1], var(t))`.
fn reverse_walk<R: Rng>(
    rng: &mut R,
    out: &mut [f64],
    mean_last: f64,
    coef: f64,
    var_last: f64,
    var: impl Fn(usize) -> f64,
) {
    let n = out.len();
    out[n - 1] = sample_normal(rng, mean_last, var_last);
    for t in (0..n - 1).rev() {
        out[t] = sample_normal(rng, coef * out[t + 1], var(t));
    }
}

/// Runs one chain and returns its thinned post-burn-in states.
pub fn run_chain(
    obs: &Observations,
    hyper: &Hyperconfig,
    cfg: &McmcConfig,
    chain: u64,
) -> Result<Vec<ModelState>> {
    cfg.validate()?;
    hyper.validate()?;
    let mut ch = Chain::new(obs.clone(), hyper, cfg, chain_rng(cfg.seed, chain))?;
    let burnin = cfg.burnin_sweeps();
    let kept = cfg.retained_per_chain();
    let mut out = Vec::with_capacity(kept);
    for i in 1..=(burnin + kept * cfg.thin) {
        ch.sweep();
        if i == burnin {
            ch.freeze();
        }
        if i > burnin && (i - burnin).is_multiple_of(cfg.thin) {
            out.push(ch.state().clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_prior, simulate_observations, Dims};

    fn small_cfg() -> McmcConfig {
        McmcConfig {
            n_chains: 1,
            n_iterations: 400,
            thin: 2,
            burnin_thinned: 100,
            adapt_window: 20,
            ..McmcConfig::default()
        }
    }

    fn synthetic(seed: u64) -> (Observations, Hyperconfig) {
        let hyper = Hyperconfig::default();
        let truth = sample_prior(&hyper, Dims::new(2, 2, 5), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (simulate_observations(&truth, &hyper, None, &mut rng), hyper)
    }

    #[test]
    fn same_seed_gives_identical_draws() {
        let (obs, hyper) = synthetic(3);
        let a = run_chain(&obs, &hyper, &small_cfg(), 0).unwrap();
        let b = run_chain(&obs, &hyper, &small_cfg(), 0).unwrap();
        assert_eq!(a.len(), 100);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.to_flat(), y.to_flat());
        }
        let c = run_chain(&obs, &hyper, &small_cfg(), 1).unwrap();
        assert_ne!(a[99].to_flat(), c[99].to_flat());
    }

    #[test]
    fn retained_draws_respect_support() {
        let (obs, hyper) = synthetic(4);
        let cfg = McmcConfig { block_walks: true, ..small_cfg() };
        for st in run_chain(&obs, &hyper, &cfg, 0).unwrap() {
            assert!(st.in_support());
            assert!(st.var_season <= st.var_season_init);
            assert!(st.alpha_interaction.iter().all(|&a| a > 0.0 && a < 1.0));
        }
    }

    #[test]
    fn proposing_the_current_point_is_always_accepted() {
        let (obs, hyper) = synthetic(5);
        let ch = Chain::new(obs, &hyper, &small_cfg(), chain_rng(1, 0)).unwrap();
        for p in schedule(ch.state().dims) {
            assert_eq!(ch.log_acceptance_ratio(p, p.get(ch.state())), 0.0, "{p:?}");
        }
    }

    #[test]
    fn step_sizes_frozen_after_burnin() {
        let (obs, hyper) = synthetic(6);
        let mut ch = Chain::new(obs, &hyper, &small_cfg(), chain_rng(1, 0)).unwrap();
        for _ in 0..100 {
            ch.sweep();
        }
        ch.freeze();
        let before = ch.step_sizes();
        for _ in 0..100 {
            ch.sweep();
        }
        assert_eq!(before, ch.step_sizes());
    }

    #[test]
    fn pi_cache_tracks_state() {
        let (obs, hyper) = synthetic(7);
        let cfg = McmcConfig { block_walks: true, ..small_cfg() };
        let mut ch = Chain::new(obs, &hyper, &cfg, chain_rng(2, 0)).unwrap();
        for _ in 0..30 {
            ch.sweep();
        }
        let fresh = pi_cache(ch.state());
        for (a, b) in ch.pi.iter().zip(&fresh) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
