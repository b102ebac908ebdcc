//! Joint-distribution test of the sampler: draws of (parameters, data)
//! from the prior ("marginal-conditional") are compared with draws produced
//! by alternating MCMC transitions and data regeneration
//! ("successive-conditional"). A correct sampler leaves both with the same
//! parameter marginals.

use rustfft::FftPlanner;
use serde::Serialize;

use super::chain::{chain_rng, Chain};
use super::config::McmcConfig;
use super::diagnostics::effective_sample_size;
use crate::error::Result;
use crate::model::{sample_prior_with, simulate_observations, Dims, Hyperconfig, ModelState, PriorOverrides};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GewekeMoment {
    pub name: &'static str,
    pub prior_mean: f64,
    pub chain_mean: f64,
    pub z: f64,
}

fn mean_of(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

type MomentFn = fn(&ModelState) -> f64;

/// Scalar functionals with finite variance under the prior.
pub fn moment_functions() -> Vec<(&'static str, MomentFn)> {
    vec![
        ("lambda_prec", |s| s.lambda_prec),
        ("prec_all_init", |s| s.prec_all_init),
        ("prec_all", |s| s.prec_all),
        ("prec_state_init", |s| s.prec_state_init),
        ("prec_state", |s| s.prec_state),
        ("prec_season", |s| s.prec_season),
        ("prec_interaction", |s| s.prec_interaction),
        ("alpha_a", |s| s.alpha_a),
        ("alpha_b", |s| s.alpha_b),
        ("ln var_all_init", |s| s.var_all_init.ln()),
        ("ln var_all", |s| s.var_all.ln()),
        ("ln var_state_init", |s| s.var_state_init.ln()),
        ("mean ln var_state", |s| mean_of(s.var_state.iter().map(|v| v.ln()))),
        ("ln var_season_init", |s| s.var_season_init.ln()),
        ("var_season ratio", |s| s.var_season / s.var_season_init),
        ("ln var_interaction_mean", |s| s.var_interaction_mean.ln()),
        ("mean ln var_interaction", |s| mean_of(s.var_interaction.iter().map(|v| v.ln()))),
        ("mean ln lambda", |s| mean_of(s.lambda.iter().map(|v| v.ln()))),
        ("mean alpha", |s| mean_of(s.alpha_interaction.iter().copied())),
        ("mean eta", |s| mean_of(s.eta_interaction.iter().copied())),
        ("theta first week", |s| {
            let d = s.dims;
            mean_of((0..d.r).flat_map(|r| (0..d.s).map(move |q| (r, q))).map(|(r, q)| s.theta(r, q, 0)))
        }),
        ("theta last week", |s| {
            let d = s.dims;
            mean_of(
                (0..d.r)
                    .flat_map(|r| (0..d.s).map(move |q| (r, q)))
                    .map(|(r, q)| s.theta(r, q, d.t - 1)),
            )
        }),
        ("theta squared", |s| {
            let d = s.dims;
            mean_of(
                (0..d.r)
                    .flat_map(|r| (0..d.s).flat_map(move |q| (0..d.t).map(move |t| (r, q, t))))
                    .map(|(r, q, t)| s.theta(r, q, t).powi(2)),
            )
        }),
    ]
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0);
    (m, v)
}

/// Runs `n_cycles` of each simulator on a model of size `dims`. Each
/// successive-conditional cycle applies `cfg.thin` sweeps and then redraws
/// the data. Step sizes adapt during a warm-up of `max(100, n_cycles / 10)`
/// cycles and are frozen before recording.
pub fn geweke_joint_test(
    hyper: &Hyperconfig,
    cfg: &McmcConfig,
    dims: Dims,
    n_cycles: usize,
) -> Result<Vec<GewekeMoment>> {
    if n_cycles == 0 {
        return Ok(Vec::new());
    }
    hyper.validate()?;
    let moments = moment_functions();

    let mut prior_rng = chain_rng(cfg.seed, u64::MAX);
    let mut marginal = vec![Vec::with_capacity(n_cycles); moments.len()];
    for _ in 0..n_cycles {
        let st = sample_prior_with(hyper, dims, PriorOverrides::default(), &mut prior_rng);
        for (k, (_, f)) in moments.iter().enumerate() {
            marginal[k].push(f(&st));
        }
    }

    let mut rng = chain_rng(cfg.seed, 0);
    let start = sample_prior_with(hyper, dims, PriorOverrides::default(), &mut rng);
    let obs = simulate_observations(&start, hyper, None, &mut rng);
    let mut chain = Chain::from_state(start, obs, hyper, cfg, rng);
    let warmup = (n_cycles / 10).max(100);
    let mut successive = vec![Vec::with_capacity(n_cycles); moments.len()];
    for cycle in 0..warmup + n_cycles {
        if cycle == warmup {
            chain.freeze();
        }
        for _ in 0..cfg.thin {
            chain.sweep();
        }
        let st = chain.state().clone();
        let obs = simulate_observations(&st, hyper, None, chain.rng());
        chain.set_observations(obs);
        if cycle >= warmup {
            for (k, (_, f)) in moments.iter().enumerate() {
                successive[k].push(f(&st));
            }
        }
    }

    let mut planner = FftPlanner::new();
    Ok(moments
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let (m1, v1) = mean_var(&marginal[k]);
            let (m2, v2) = mean_var(&successive[k]);
            let ess = effective_sample_size(std::slice::from_ref(&successive[k]), &mut planner);
            let se = (v1 / n_cycles as f64 + v2 / ess).sqrt();
            GewekeMoment { name, prior_mean: m1, chain_mean: m2, z: (m1 - m2) / se }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_cycles_is_empty() {
        let out = geweke_joint_test(&Hyperconfig::default(), &McmcConfig::default(), Dims::new(2, 2, 6), 0)
            .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn moments_finite_on_prior_draws() {
        let hyper = Hyperconfig::default();
        let st = crate::model::sample_prior(&hyper, Dims::new(2, 2, 6), 9);
        for (name, f) in moment_functions() {
            assert!(f(&st).is_finite(), "{name}");
        }
    }
}
