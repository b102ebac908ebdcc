//! Scalar parameters of the model, their unconstrained transforms, and the
//! log-density of each one's Markov blanket.

use crate::model::density::{
    ln_beta_pdf, ln_gamma_pdf, ln_half_normal, ln_half_t, ln_normal, ln_truncated_t, logistic,
    logit,
};
use crate::model::likelihood::ln_obs_term;
use crate::model::{Dims, Hyperconfig, ModelState, Observations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    MuAll(usize),
    MuState(usize, usize),
    MuSeason(usize, usize),
    MuInteraction(usize, usize, usize),
    Lambda(usize),
    LambdaPrec,
    VarAllInit,
    VarAll,
    PrecAllInit,
    PrecAll,
    VarStateInit,
    PrecStateInit,
    VarState(usize),
    PrecState,
    VarSeasonInit,
    VarSeason,
    PrecSeason,
    Eta(usize),
    VarInteractionMean,
    Alpha(usize),
    AlphaA,
    AlphaB,
    VarInteraction(usize, usize),
    PrecInteraction,
}

/// How a parameter is mapped to the real line for random-walk proposals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Identity,
    /// `z = ln x`.
    Log,
    /// `z = logit(x)`.
    Logit,
    /// `z = logit(x / bound)`.
    ScaledLogit(f64),
}

impl Transform {
    pub fn forward(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Log => x.ln(),
            Transform::Logit => logit(x),
            Transform::ScaledLogit(b) => logit(x / b),
        }
    }

    pub fn inverse(self, z: f64) -> f64 {
        match self {
            Transform::Identity => z,
            Transform::Log => z.exp(),
            Transform::Logit => logistic(z),
            Transform::ScaledLogit(b) => b * logistic(z),
        }
    }

    /// `ln |dx/dz|` up to an additive constant.
    pub fn ln_jacobian(self, x: f64) -> f64 {
        match self {
            Transform::Identity => 0.0,
            Transform::Log => x.ln(),
            Transform::Logit => x.ln() + (-x).ln_1p(),
            Transform::ScaledLogit(b) => x.ln() + (-x / b).ln_1p(),
        }
    }

    /// Whether `x` is a usable image of a finite `z` (not rounded onto a bound).
    pub fn admits(self, x: f64) -> bool {
        match self {
            Transform::Identity => x.is_finite(),
            Transform::Log => x > 0.0 && x.is_finite(),
            Transform::Logit => x > 0.0 && x < 1.0,
            Transform::ScaledLogit(b) => x > 0.0 && x < b,
        }
    }
}

/// Every scalar parameter in the flat order of [`ModelState::to_flat`].
pub fn schedule(d: Dims) -> Vec<Param> {
    let mut out = Vec::with_capacity(d.n_params());
    out.extend((0..d.t).map(Param::MuAll));
    for r in 0..d.r {
        out.extend((0..d.t).map(|t| Param::MuState(r, t)));
    }
    for s in 0..d.s {
        out.extend((0..d.t).map(|t| Param::MuSeason(s, t)));
    }
    for r in 0..d.r {
        for s in 0..d.s {
            out.extend((0..d.t).map(|t| Param::MuInteraction(r, s, t)));
        }
    }
    out.extend((0..d.r).map(Param::Lambda));
    out.extend([
        Param::LambdaPrec,
        Param::VarAllInit,
        Param::VarAll,
        Param::PrecAllInit,
        Param::PrecAll,
        Param::VarStateInit,
        Param::PrecStateInit,
    ]);
    out.extend((0..d.r).map(Param::VarState));
    out.extend([Param::PrecState, Param::VarSeasonInit, Param::VarSeason, Param::PrecSeason]);
    out.extend((0..d.r).map(Param::Eta));
    out.push(Param::VarInteractionMean);
    out.extend((0..d.r).map(Param::Alpha));
    out.extend([Param::AlphaA, Param::AlphaB]);
    for r in 0..d.r {
        out.extend((0..d.t).map(|t| Param::VarInteraction(r, t)));
    }
    out.push(Param::PrecInteraction);
    out
}

impl Param {
    pub fn is_walk(self) -> bool {
        matches!(
            self,
            Param::MuAll(_) | Param::MuState(..) | Param::MuSeason(..) | Param::MuInteraction(..)
        )
    }

    pub fn transform(self, st: &ModelState) -> Transform {
        match self {
            Param::MuAll(_)
            | Param::MuState(..)
            | Param::MuSeason(..)
            | Param::MuInteraction(..)
            | Param::Eta(_) => Transform::Identity,
            Param::Alpha(_) => Transform::Logit,
            Param::VarSeason => Transform::ScaledLogit(st.var_season_init),
            _ => Transform::Log,
        }
    }

    pub fn get(self, st: &ModelState) -> f64 {
        let d = st.dims;
        match self {
            Param::MuAll(t) => st.mu_all[t],
            Param::MuState(r, t) => st.mu_state[r * d.t + t],
            Param::MuSeason(s, t) => st.mu_season[s * d.t + t],
            Param::MuInteraction(r, s, t) => st.mu_interaction[d.cell(r, s, t)],
            Param::Lambda(r) => st.lambda[r],
            Param::LambdaPrec => st.lambda_prec,
            Param::VarAllInit => st.var_all_init,
            Param::VarAll => st.var_all,
            Param::PrecAllInit => st.prec_all_init,
            Param::PrecAll => st.prec_all,
            Param::VarStateInit => st.var_state_init,
            Param::PrecStateInit => st.prec_state_init,
            Param::VarState(r) => st.var_state[r],
            Param::PrecState => st.prec_state,
            Param::VarSeasonInit => st.var_season_init,
            Param::VarSeason => st.var_season,
            Param::PrecSeason => st.prec_season,
            Param::Eta(r) => st.eta_interaction[r],
            Param::VarInteractionMean => st.var_interaction_mean,
            Param::Alpha(r) => st.alpha_interaction[r],
            Param::AlphaA => st.alpha_a,
            Param::AlphaB => st.alpha_b,
            Param::VarInteraction(r, t) => st.var_interaction[r * d.t + t],
            Param::PrecInteraction => st.prec_interaction,
        }
    }

    pub fn set(self, st: &mut ModelState, x: f64) {
        let d = st.dims;
        let slot = match self {
            Param::MuAll(t) => &mut st.mu_all[t],
            Param::MuState(r, t) => &mut st.mu_state[r * d.t + t],
            Param::MuSeason(s, t) => &mut st.mu_season[s * d.t + t],
            Param::MuInteraction(r, s, t) => &mut st.mu_interaction[d.cell(r, s, t)],
            Param::Lambda(r) => &mut st.lambda[r],
            Param::LambdaPrec => &mut st.lambda_prec,
            Param::VarAllInit => &mut st.var_all_init,
            Param::VarAll => &mut st.var_all,
            Param::PrecAllInit => &mut st.prec_all_init,
            Param::PrecAll => &mut st.prec_all,
            Param::VarStateInit => &mut st.var_state_init,
            Param::PrecStateInit => &mut st.prec_state_init,
            Param::VarState(r) => &mut st.var_state[r],
            Param::PrecState => &mut st.prec_state,
            Param::VarSeasonInit => &mut st.var_season_init,
            Param::VarSeason => &mut st.var_season,
            Param::PrecSeason => &mut st.prec_season,
            Param::Eta(r) => &mut st.eta_interaction[r],
            Param::VarInteractionMean => &mut st.var_interaction_mean,
            Param::Alpha(r) => &mut st.alpha_interaction[r],
            Param::AlphaA => &mut st.alpha_a,
            Param::AlphaB => &mut st.alpha_b,
            Param::VarInteraction(r, t) => &mut st.var_interaction[r * d.t + t],
            Param::PrecInteraction => &mut st.prec_interaction,
        };
        *slot = x;
    }
}

/// Read-only view used to evaluate full conditionals.
pub struct Blanket<'a> {
    pub st: &'a ModelState,
    pub obs: &'a Observations,
    pub hyper: &'a Hyperconfig,
    /// Cached `π` for every cell, consistent with `st`.
    pub pi: &'a [f64],
}

impl Blanket<'_> {
    fn gamma(&self, x: f64) -> f64 {
        ln_gamma_pdf(x, self.hyper.gamma_shape, self.hyper.gamma_rate)
    }

    #[inline]
    fn obs_term(&self, cell: usize, lambda: f64, pi: f64) -> f64 {
        match self.obs.logs_at(cell) {
            Some((ly, l1y)) => ln_obs_term(ly, l1y, lambda, pi, self.hyper.beta_floor),
            None => 0.0,
        }
    }

    /// Log-likelihood of the cells whose `π` moves by `shift`.
    fn shifted_likelihood(&self, cells: impl Iterator<Item = (usize, usize)>, shift: f64) -> f64 {
        cells
            .map(|(r, cell)| self.obs_term(cell, self.st.lambda[r], self.pi[cell] + shift))
            .sum()
    }

    /// Sum of the log-density factors that mention `p`, evaluated with `p`
    /// set to `x`. Equal to `log_joint` up to a term not depending on `p`.
    pub fn log_density(&self, p: Param, x: f64) -> f64 {
        let st = self.st;
        let d = st.dims;
        let k = self.hyper.t_dof;
        let (nr, ns, nt) = (d.r, d.s, d.t);
        match p {
            Param::MuAll(t) => {
                let mut lp = if t == 0 {
                    ln_normal(x, 0.0, st.var_all_init)
                } else {
                    ln_normal(x, st.mu_all[t - 1], st.var_all)
                };
                if t + 1 < nt {
                    lp += ln_normal(st.mu_all[t + 1], x, st.var_all);
                }
                let shift = x - st.mu_all[t];
                let cells = (0..nr).flat_map(move |r| (0..ns).map(move |s| (r, d.cell(r, s, t))));
                lp + self.shifted_likelihood(cells, shift)
            }
            Param::MuState(r, t) => {
                let walk = &st.mu_state[r * nt..(r + 1) * nt];
                let mut lp = if t == 0 {
                    ln_normal(x, 0.0, st.var_state_init)
                } else {
                    ln_normal(x, walk[t - 1], st.var_state[r])
                };
                if t + 1 < nt {
                    lp += ln_normal(walk[t + 1], x, st.var_state[r]);
                }
                let cells = (0..ns).map(move |s| (r, d.cell(r, s, t)));
                lp + self.shifted_likelihood(cells, x - walk[t])
            }
            Param::MuSeason(s, t) => {
                let walk = &st.mu_season[s * nt..(s + 1) * nt];
                let mut lp = if t == nt - 1 {
                    ln_normal(x, 0.0, st.var_season_init)
                } else {
                    ln_normal(x, walk[t + 1], st.var_season)
                };
                if t > 0 {
                    lp += ln_normal(walk[t - 1], x, st.var_season);
                }
                let cells = (0..nr).map(move |r| (r, d.cell(r, s, t)));
                lp + self.shifted_likelihood(cells, x - walk[t])
            }
            Param::MuInteraction(r, s, t) => {
                let base = d.cell(r, s, 0);
                let walk = &st.mu_interaction[base..base + nt];
                let vars = &st.var_interaction[r * nt..(r + 1) * nt];
                let alpha = st.alpha_interaction[r];
                let mut lp = if t == nt - 1 {
                    ln_normal(x, st.eta_interaction[r], vars[t])
                } else {
                    ln_normal(x, alpha * walk[t + 1], vars[t])
                };
                if t > 0 {
                    lp += ln_normal(walk[t - 1], alpha * x, vars[t - 1]);
                }
                let cell = base + t;
                lp + self.obs_term(cell, st.lambda[r], self.pi[cell] + x - walk[t])
            }
            Param::Lambda(r) => {
                let mut lp = ln_half_t(x, st.lambda_prec, k);
                for s in 0..ns {
                    for t in 0..nt {
                        let cell = d.cell(r, s, t);
                        lp += self.obs_term(cell, x, self.pi[cell]);
                    }
                }
                lp
            }
            Param::LambdaPrec => {
                st.lambda.iter().map(|&l| ln_half_t(l, x, k)).sum::<f64>() + self.gamma(x)
            }
            Param::VarAllInit => {
                ln_normal(st.mu_all[0], 0.0, x) + ln_half_normal(x, st.prec_all_init)
            }
            Param::VarAll => {
                (1..nt)
                    .map(|t| ln_normal(st.mu_all[t], st.mu_all[t - 1], x))
                    .sum::<f64>()
                    + ln_half_normal(x, st.prec_all)
            }
            Param::PrecAllInit => ln_half_normal(st.var_all_init, x) + self.gamma(x),
            Param::PrecAll => ln_half_normal(st.var_all, x) + self.gamma(x),
            Param::VarStateInit => {
                (0..nr)
                    .map(|r| ln_normal(st.mu_state[r * nt], 0.0, x))
                    .sum::<f64>()
                    + ln_half_normal(x, st.prec_state_init)
            }
            Param::PrecStateInit => ln_half_normal(st.var_state_init, x) + self.gamma(x),
            Param::VarState(r) => {
                let walk = &st.mu_state[r * nt..(r + 1) * nt];
                (1..nt)
                    .map(|t| ln_normal(walk[t], walk[t - 1], x))
                    .sum::<f64>()
                    + ln_half_t(x, st.prec_state, k)
            }
            Param::PrecState => {
                st.var_state.iter().map(|&v| ln_half_t(v, x, k)).sum::<f64>() + self.gamma(x)
            }
            Param::VarSeasonInit => {
                (0..ns)
                    .map(|s| ln_normal(st.mu_season[s * nt + nt - 1], 0.0, x))
                    .sum::<f64>()
                    + ln_half_t(x, st.prec_season, k)
                    + ln_truncated_t(st.var_season, st.prec_season, k, x)
            }
            Param::VarSeason => {
                let mut lp = ln_truncated_t(x, st.prec_season, k, st.var_season_init);
                for s in 0..ns {
                    let walk = &st.mu_season[s * nt..(s + 1) * nt];
                    for t in 0..nt - 1 {
                        lp += ln_normal(walk[t], walk[t + 1], x);
                    }
                }
                lp
            }
            Param::PrecSeason => {
                ln_half_t(st.var_season_init, x, k)
                    + ln_truncated_t(st.var_season, x, k, st.var_season_init)
                    + self.gamma(x)
            }
            Param::Eta(r) => {
                let v = st.var_interaction[r * nt + nt - 1];
                (0..ns)
                    .map(|s| ln_normal(st.mu_interaction[d.cell(r, s, nt - 1)], x, v))
                    .sum::<f64>()
                    + ln_normal(x, 0.0, st.var_interaction_mean)
            }
            Param::VarInteractionMean => {
                st.eta_interaction
                    .iter()
                    .map(|&e| ln_normal(e, 0.0, x))
                    .sum::<f64>()
                    + ln_half_normal(x, 1.0 / self.hyper.var_interaction_mean_prior_var)
            }
            Param::Alpha(r) => {
                let vars = &st.var_interaction[r * nt..(r + 1) * nt];
                let mut lp = ln_beta_pdf(x, st.alpha_a, st.alpha_b);
                for s in 0..ns {
                    let base = d.cell(r, s, 0);
                    let walk = &st.mu_interaction[base..base + nt];
                    for t in 0..nt - 1 {
                        lp += ln_normal(walk[t], x * walk[t + 1], vars[t]);
                    }
                }
                lp
            }
            Param::AlphaA => {
                st.alpha_interaction
                    .iter()
                    .map(|&a| ln_beta_pdf(a, x, st.alpha_b))
                    .sum::<f64>()
                    + self.gamma(x)
            }
            Param::AlphaB => {
                st.alpha_interaction
                    .iter()
                    .map(|&a| ln_beta_pdf(a, st.alpha_a, x))
                    .sum::<f64>()
                    + self.gamma(x)
            }
            Param::VarInteraction(r, t) => {
                let alpha = st.alpha_interaction[r];
                let mut lp = ln_half_t(x, st.prec_interaction, k);
                for s in 0..ns {
                    let base = d.cell(r, s, 0);
                    let mean = if t == nt - 1 {
                        st.eta_interaction[r]
                    } else {
                        alpha * st.mu_interaction[base + t + 1]
                    };
                    lp += ln_normal(st.mu_interaction[base + t], mean, x);
                }
                lp
            }
            Param::PrecInteraction => {
                st.var_interaction
                    .iter()
                    .map(|&v| ln_half_t(v, x, k))
                    .sum::<f64>()
                    + self.gamma(x)
            }
        }
    }
}

/// `π` for every cell of `st`.
pub fn pi_cache(st: &ModelState) -> Vec<f64> {
    let d = st.dims;
    let mut out = vec![0.0; d.cells()];
    for r in 0..d.r {
        for s in 0..d.s {
            for t in 0..d.t {
                out[d.cell(r, s, t)] = st.pi(r, s, t);
            }
        }
    }
    out
}

/// Applies a change of `delta` in walk parameter `p` to the `π` cache.
pub fn shift_pi(pi: &mut [f64], d: Dims, p: Param, delta: f64) {
    match p {
        Param::MuAll(t) => {
            for r in 0..d.r {
                for s in 0..d.s {
                    pi[d.cell(r, s, t)] += delta;
                }
            }
        }
        Param::MuState(r, t) => {
            for s in 0..d.s {
                pi[d.cell(r, s, t)] += delta;
            }
        }
        Param::MuSeason(s, t) => {
            for r in 0..d.r {
                pi[d.cell(r, s, t)] += delta;
            }
        }
        Param::MuInteraction(r, s, t) => pi[d.cell(r, s, t)] += delta,
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{log_joint, sample_prior, simulate_observations};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_matches_flat_layout() {
        let d = Dims::new(3, 2, 4);
        let st = sample_prior(&Hyperconfig::default(), d, 1);
        let flat = st.to_flat();
        let sched = schedule(d);
        assert_eq!(sched.len(), flat.len());
        for (p, v) in sched.iter().zip(&flat) {
            assert_eq!(p.get(&st), *v, "{p:?}");
        }
    }

    #[test]
    fn transforms_roundtrip() {
        for (tr, x) in [
            (Transform::Identity, -1.3),
            (Transform::Log, 0.02),
            (Transform::Logit, 0.3),
            (Transform::ScaledLogit(2.0), 1.7),
        ] {
            assert!((tr.inverse(tr.forward(x)) - x).abs() < 1e-12);
        }
    }

    /// For each parameter, the change in its blanket density between two
    /// values equals the change in the full joint density.
    #[test]
    fn blanket_differences_match_joint_differences() {
        let hyper = Hyperconfig::default();
        let d = Dims::new(3, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for seed in 0..3 {
            let st = sample_prior(&hyper, d, 100 + seed);
            let mut obs = simulate_observations(&st, &hyper, None, &mut rng);
            obs.clear(1, 0, 2);
            let pi = pi_cache(&st);
            let base = log_joint(&st, &obs, &hyper).unwrap();
            let blanket = Blanket { st: &st, obs: &obs, hyper: &hyper, pi: &pi };
            for p in schedule(d) {
                let x0 = p.get(&st);
                let tr = p.transform(&st);
                let x1 = tr.inverse(tr.forward(x0) + 0.1);
                let mut moved = st.clone();
                p.set(&mut moved, x1);
                let full = log_joint(&moved, &obs, &hyper).unwrap() - base;
                let local = blanket.log_density(p, x1) - blanket.log_density(p, x0);
                assert!(
                    (full - local).abs() < 1e-8 * (1.0 + full.abs()),
                    "{p:?}: joint {full} vs blanket {local}"
                );
            }
        }
    }
}
