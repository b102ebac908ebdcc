//! Prior log-density of the full parameter state.

use super::density::{ln_beta_pdf, ln_gamma_pdf, ln_half_normal, ln_half_t, ln_normal, ln_truncated_t};
use super::hyper::Hyperconfig;
use super::likelihood::log_likelihood;
use super::observations::Observations;
use super::state::ModelState;
use crate::error::Result;

/// Sum of every prior factor; `-∞` outside the support.
pub fn log_prior(st: &ModelState, hyper: &Hyperconfig) -> f64 {
    if !st.in_support() {
        return f64::NEG_INFINITY;
    }
    let d = st.dims;
    let k = hyper.t_dof;
    let gamma = |x: f64| ln_gamma_pdf(x, hyper.gamma_shape, hyper.gamma_rate);
    let mut lp = 0.0;

    // Common curve: forward random walk.
    lp += ln_normal(st.mu_all[0], 0.0, st.var_all_init);
    for t in 1..d.t {
        lp += ln_normal(st.mu_all[t], st.mu_all[t - 1], st.var_all);
    }
    lp += ln_half_normal(st.var_all_init, st.prec_all_init) + ln_half_normal(st.var_all, st.prec_all);
    lp += gamma(st.prec_all_init) + gamma(st.prec_all);

    // State deviations: hierarchical forward random walks.
    for r in 0..d.r {
        let walk = &st.mu_state[r * d.t..(r + 1) * d.t];
        lp += ln_normal(walk[0], 0.0, st.var_state_init);
        for t in 1..d.t {
            lp += ln_normal(walk[t], walk[t - 1], st.var_state[r]);
        }
        lp += ln_half_t(st.var_state[r], st.prec_state, k);
    }
    lp += gamma(st.prec_state);
    lp += ln_half_normal(st.var_state_init, st.prec_state_init) + gamma(st.prec_state_init);

    // Season deviations: reverse random walks anchored at the final week.
    for s in 0..d.s {
        let walk = &st.mu_season[s * d.t..(s + 1) * d.t];
        lp += ln_normal(walk[d.t - 1], 0.0, st.var_season_init);
        for t in 0..d.t - 1 {
            lp += ln_normal(walk[t], walk[t + 1], st.var_season);
        }
    }
    lp += ln_half_t(st.var_season_init, st.prec_season, k);
    lp += ln_truncated_t(st.var_season, st.prec_season, k, st.var_season_init);
    lp += gamma(st.prec_season);

    // Interaction: hierarchical reverse random walks with AR shrinkage.
    for r in 0..d.r {
        let vars = &st.var_interaction[r * d.t..(r + 1) * d.t];
        let alpha = st.alpha_interaction[r];
        for s in 0..d.s {
            let base = d.cell(r, s, 0);
            let walk = &st.mu_interaction[base..base + d.t];
            lp += ln_normal(walk[d.t - 1], st.eta_interaction[r], vars[d.t - 1]);
            for t in 0..d.t - 1 {
                lp += ln_normal(walk[t], alpha * walk[t + 1], vars[t]);
            }
        }
        lp += ln_normal(st.eta_interaction[r], 0.0, st.var_interaction_mean);
        lp += ln_beta_pdf(alpha, st.alpha_a, st.alpha_b);
        for &v in vars {
            lp += ln_half_t(v, st.prec_interaction, k);
        }
    }
    lp += ln_half_normal(st.var_interaction_mean, 1.0 / hyper.var_interaction_mean_prior_var);
    lp += gamma(st.alpha_a) + gamma(st.alpha_b) + gamma(st.prec_interaction);

    // Observation precisions.
    for &lambda in &st.lambda {
        lp += ln_half_t(lambda, st.lambda_prec, k);
    }
    lp += gamma(st.lambda_prec);

    if lp.is_nan() {
        f64::NEG_INFINITY
    } else {
        lp
    }
}

/// `log_prior + log_likelihood`; `-∞` propagates without evaluating the data.
pub fn log_joint(st: &ModelState, obs: &Observations, hyper: &Hyperconfig) -> Result<f64> {
    let lp = log_prior(st, hyper);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    Ok(lp + log_likelihood(st, obs, hyper)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::state::Dims;

    #[test]
    fn leaving_support_gives_neg_infinity() {
        let dims = Dims::new(2, 2, 4);
        let hyper = Hyperconfig::default();
        let obs = Observations::all_missing(dims);
        let base = ModelState::neutral(dims);
        assert!(log_joint(&base, &obs, &hyper).unwrap().is_finite());

        let mut st = base.clone();
        st.var_all = -0.1;
        assert_eq!(log_joint(&st, &obs, &hyper).unwrap(), f64::NEG_INFINITY);

        let mut st = base.clone();
        st.var_season = st.var_season_init * 1.01;
        assert_eq!(log_prior(&st, &hyper), f64::NEG_INFINITY);

        let mut st = base;
        st.alpha_interaction[1] = 1.0;
        assert_eq!(log_prior(&st, &hyper), f64::NEG_INFINITY);
    }

    #[test]
    fn joint_equals_prior_without_data() {
        let dims = Dims::new(2, 3, 5);
        let hyper = Hyperconfig::default();
        let mut st = ModelState::neutral(dims);
        st.mu_all[2] = 0.7;
        st.var_season = 0.4;
        let lj = log_joint(&st, &Observations::all_missing(dims), &hyper).unwrap();
        assert_eq!(lj, log_prior(&st, &hyper));
    }

    #[test]
    fn gamma_hyperprior_has_unit_mean() {
        let hyper = Hyperconfig::default();
        assert_eq!(hyper.gamma_shape / hyper.gamma_rate, 1.0);
    }

    #[test]
    fn unit_beta_shapes_make_alpha_prior_flat() {
        let a = ln_beta_pdf(0.1, 1.0, 1.0);
        let b = ln_beta_pdf(0.77, 1.0, 1.0);
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
    }
}
