use super::density::{ln_beta_pdf_logs, logistic};
use super::hyper::Hyperconfig;
use super::observations::Observations;
use super::state::ModelState;
use crate::error::{DanteError, Result};

/// Beta shape arguments `(λθ, λ(1-θ))` for logit mean `pi`, each floored.
#[inline]
pub fn beta_shapes(lambda: f64, pi: f64, floor: f64) -> (f64, f64) {
    let a = lambda * logistic(pi);
    let b = lambda * logistic(-pi);
    (a.max(floor), b.max(floor))
}

/// Log-density of one observation given its state precision and logit mean.
#[inline]
pub fn ln_obs_term(ln_y: f64, ln_1my: f64, lambda: f64, pi: f64, floor: f64) -> f64 {
    let (a, b) = beta_shapes(lambda, pi, floor);
    ln_beta_pdf_logs(ln_y, ln_1my, a, b)
}

/// Sum of Beta log-densities over the present observations. Missing cells
/// contribute nothing.
pub fn log_likelihood(state: &ModelState, obs: &Observations, hyper: &Hyperconfig) -> Result<f64> {
    let d = state.dims;
    assert_eq!(d, obs.dims, "state and observation shapes differ");
    let mut total = 0.0;
    for r in 0..d.r {
        let lambda = state.lambda[r];
        for s in 0..d.s {
            for t in 0..d.t {
                let Some((ln_y, ln_1my)) = obs.logs_at(d.cell(r, s, t)) else {
                    continue;
                };
                let term = ln_obs_term(ln_y, ln_1my, lambda, state.pi(r, s, t), hyper.beta_floor);
                if !term.is_finite() {
                    return Err(DanteError::Numerical(format!(
                        "non-finite likelihood term at region {}, season {}, week {}",
                        r + 1,
                        s + 1,
                        t + 1
                    )));
                }
                total += term;
            }
        }
    }
    Ok(total)
}
