//! Forward simulation of the generative hierarchy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::density::{
    sample_beta, sample_beta_logs, sample_gamma, sample_half_normal, sample_half_t, sample_normal,
    sample_truncated_t,
};
use super::hyper::Hyperconfig;
use super::likelihood::beta_shapes;
use super::observations::Observations;
use super::state::{Dims, ModelState};

/// Values pinned instead of drawn, for checking conditional prior laws.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PriorOverrides {
    pub alpha_interaction: Option<f64>,
    pub eta_interaction: Option<f64>,
}

/// Ancestral draw from the prior with a fresh RNG seeded by `seed`.
pub fn sample_prior(hyper: &Hyperconfig, dims: Dims, seed: u64) -> ModelState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_prior_with(hyper, dims, PriorOverrides::default(), &mut rng)
}

pub fn sample_prior_with<R: Rng + ?Sized>(
    hyper: &Hyperconfig,
    dims: Dims,
    overrides: PriorOverrides,
    rng: &mut R,
) -> ModelState {
    let Dims { r: nr, s: ns, t: nt } = dims;
    let k = hyper.t_dof;
    let gamma = |rng: &mut R| sample_gamma(rng, hyper.gamma_shape, hyper.gamma_rate);
    let mut st = ModelState::neutral(dims);

    st.prec_all_init = gamma(rng);
    st.prec_all = gamma(rng);
    st.var_all_init = sample_half_normal(rng, st.prec_all_init);
    st.var_all = sample_half_normal(rng, st.prec_all);
    st.mu_all[0] = sample_normal(rng, 0.0, st.var_all_init);
    for t in 1..nt {
        st.mu_all[t] = sample_normal(rng, st.mu_all[t - 1], st.var_all);
    }

    st.prec_state_init = gamma(rng);
    st.var_state_init = sample_half_normal(rng, st.prec_state_init);
    st.prec_state = gamma(rng);
    for r in 0..nr {
        st.var_state[r] = sample_half_t(rng, st.prec_state, k);
        let base = r * nt;
        st.mu_state[base] = sample_normal(rng, 0.0, st.var_state_init);
        for t in 1..nt {
            st.mu_state[base + t] = sample_normal(rng, st.mu_state[base + t - 1], st.var_state[r]);
        }
    }

    st.prec_season = gamma(rng);
    st.var_season_init = sample_half_t(rng, st.prec_season, k);
    st.var_season = sample_truncated_t(rng, st.prec_season, k, st.var_season_init);
    for s in 0..ns {
        let base = s * nt;
        st.mu_season[base + nt - 1] = sample_normal(rng, 0.0, st.var_season_init);
        for t in (0..nt - 1).rev() {
            st.mu_season[base + t] = sample_normal(rng, st.mu_season[base + t + 1], st.var_season);
        }
    }

    st.var_interaction_mean = sample_half_normal(rng, 1.0 / hyper.var_interaction_mean_prior_var);
    st.alpha_a = gamma(rng);
    st.alpha_b = gamma(rng);
    st.prec_interaction = gamma(rng);
    for r in 0..nr {
        st.eta_interaction[r] = match overrides.eta_interaction {
            Some(eta) => eta,
            None => sample_normal(rng, 0.0, st.var_interaction_mean),
        };
        st.alpha_interaction[r] = match overrides.alpha_interaction {
            Some(alpha) => alpha,
            None => sample_beta(rng, st.alpha_a, st.alpha_b),
        };
        for t in 0..nt {
            st.var_interaction[r * nt + t] = sample_half_t(rng, st.prec_interaction, k);
        }
        let vars = &st.var_interaction[r * nt..(r + 1) * nt];
        let alpha = st.alpha_interaction[r];
        for s in 0..ns {
            let base = dims.cell(r, s, 0);
            st.mu_interaction[base + nt - 1] = sample_normal(rng, st.eta_interaction[r], vars[nt - 1]);
            for t in (0..nt - 1).rev() {
                let mean = alpha * st.mu_interaction[base + t + 1];
                st.mu_interaction[base + t] = sample_normal(rng, mean, vars[t]);
            }
        }
    }

    st.lambda_prec = gamma(rng);
    for r in 0..nr {
        st.lambda[r] = sample_half_t(rng, st.lambda_prec, k);
    }
    st
}

/// Draws observations from the likelihood at every cell where `mask` is
/// present (every cell when `mask` is `None`).
pub fn simulate_observations<R: Rng + ?Sized>(
    st: &ModelState,
    hyper: &Hyperconfig,
    mask: Option<&Observations>,
    rng: &mut R,
) -> Observations {
    let d = st.dims;
    let mut obs = Observations::all_missing(d);
    for r in 0..d.r {
        for s in 0..d.s {
            for t in 0..d.t {
                if mask.is_some_and(|m| !m.is_present(r, s, t)) {
                    continue;
                }
                let (a, b) = beta_shapes(st.lambda[r], st.pi(r, s, t), hyper.beta_floor);
                let (ln_y, ln_1my) = sample_beta_logs(rng, a, b);
                obs.set_logs(r, s, t, ln_y, ln_1my);
            }
        }
    }
    obs
}
