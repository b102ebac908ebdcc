use serde::{Deserialize, Serialize};

use super::density::logistic;

/// Model dimensions: regions (states), seasons, weeks per season.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl Dims {
    pub fn new(r: usize, s: usize, t: usize) -> Self {
        Dims { r, s, t }
    }

    pub fn cells(&self) -> usize {
        self.r * self.s * self.t
    }

    #[inline]
    pub fn cell(&self, r: usize, s: usize, t: usize) -> usize {
        (r * self.s + s) * self.t + t
    }

    /// Length of the flat parameter vector.
    pub fn n_params(&self) -> usize {
        let (r, s, t) = (self.r, self.s, self.t);
        t + r * t + s * t + r * s * t + r + 1 + 4 + 2 + r + 1 + 3 + r + 1 + r + 2 + r * t + 1
    }
}

/// One point in the parameter space of the state-level model.
///
/// Time-indexed arrays use forward week order (index `t` is week `t + 1`),
/// including the two components that follow reverse random walks; their walk
/// starts at the last index. Layouts: `mu_state` and `var_interaction` are
/// `[r][t]`, `mu_season` is `[s][t]`, `mu_interaction` is `[r][s][t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub dims: Dims,
    pub mu_all: Vec<f64>,
    pub mu_state: Vec<f64>,
    pub mu_season: Vec<f64>,
    pub mu_interaction: Vec<f64>,
    /// Observation precision of each state.
    pub lambda: Vec<f64>,
    pub lambda_prec: f64,
    pub var_all_init: f64,
    pub var_all: f64,
    pub prec_all_init: f64,
    pub prec_all: f64,
    pub var_state_init: f64,
    pub prec_state_init: f64,
    pub var_state: Vec<f64>,
    pub prec_state: f64,
    /// Variance of the final-week value of each season walk.
    pub var_season_init: f64,
    /// Step variance of the season walk; bounded above by `var_season_init`.
    pub var_season: f64,
    pub prec_season: f64,
    /// Mean of the final-week interaction value for each state.
    pub eta_interaction: Vec<f64>,
    pub var_interaction_mean: f64,
    /// Autoregressive shrinkage of each state's interaction walk, in (0, 1).
    pub alpha_interaction: Vec<f64>,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub var_interaction: Vec<f64>,
    pub prec_interaction: f64,
}

impl ModelState {
    /// A state with every walk at zero and every scale parameter at one
    /// (`alpha_interaction` at one half).
    pub fn neutral(dims: Dims) -> Self {
        let Dims { r, s, t } = dims;
        ModelState {
            dims,
            mu_all: vec![0.0; t],
            mu_state: vec![0.0; r * t],
            mu_season: vec![0.0; s * t],
            mu_interaction: vec![0.0; r * s * t],
            lambda: vec![1.0; r],
            lambda_prec: 1.0,
            var_all_init: 1.0,
            var_all: 1.0,
            prec_all_init: 1.0,
            prec_all: 1.0,
            var_state_init: 1.0,
            prec_state_init: 1.0,
            var_state: vec![1.0; r],
            prec_state: 1.0,
            var_season_init: 1.0,
            var_season: 1.0,
            prec_season: 1.0,
            eta_interaction: vec![0.0; r],
            var_interaction_mean: 1.0,
            alpha_interaction: vec![0.5; r],
            alpha_a: 1.0,
            alpha_b: 1.0,
            var_interaction: vec![1.0; r * t],
            prec_interaction: 1.0,
        }
    }

    /// Logit-scale mean `π_rst`, the sum of the four walk components.
    #[inline]
    pub fn pi(&self, r: usize, s: usize, t: usize) -> f64 {
        let d = self.dims;
        self.mu_all[t]
            + self.mu_state[r * d.t + t]
            + self.mu_season[s * d.t + t]
            + self.mu_interaction[d.cell(r, s, t)]
    }

    /// Latent ILI proportion `θ_rst`.
    pub fn theta(&self, r: usize, s: usize, t: usize) -> f64 {
        logistic(self.pi(r, s, t))
    }

    /// Whether all positivity, interval and shape constraints hold.
    pub fn in_support(&self) -> bool {
        let d = self.dims;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let shapes = self.mu_all.len() == d.t
            && self.mu_state.len() == d.r * d.t
            && self.mu_season.len() == d.s * d.t
            && self.mu_interaction.len() == d.cells()
            && self.lambda.len() == d.r
            && self.var_state.len() == d.r
            && self.eta_interaction.len() == d.r
            && self.alpha_interaction.len() == d.r
            && self.var_interaction.len() == d.r * d.t;
        shapes
            && self.lambda.iter().all(|&x| positive(x))
            && self.var_state.iter().all(|&x| positive(x))
            && self.var_interaction.iter().all(|&x| positive(x))
            && self.alpha_interaction.iter().all(|&a| a > 0.0 && a < 1.0)
            && [
                self.lambda_prec,
                self.var_all_init,
                self.var_all,
                self.prec_all_init,
                self.prec_all,
                self.var_state_init,
                self.prec_state_init,
                self.prec_state,
                self.var_season_init,
                self.var_season,
                self.prec_season,
                self.var_interaction_mean,
                self.alpha_a,
                self.alpha_b,
                self.prec_interaction,
            ]
            .iter()
            .all(|&x| positive(x))
            && self.var_season <= self.var_season_init
            && self
                .mu_all
                .iter()
                .chain(&self.mu_state)
                .chain(&self.mu_season)
                .chain(&self.mu_interaction)
                .chain(&self.eta_interaction)
                .all(|x| x.is_finite())
    }

    /// Flat parameter vector in the canonical order of [`ModelState::names`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dims.n_params());
        out.extend_from_slice(&self.mu_all);
        out.extend_from_slice(&self.mu_state);
        out.extend_from_slice(&self.mu_season);
        out.extend_from_slice(&self.mu_interaction);
        out.extend_from_slice(&self.lambda);
        out.push(self.lambda_prec);
        out.extend([self.var_all_init, self.var_all, self.prec_all_init, self.prec_all]);
        out.extend([self.var_state_init, self.prec_state_init]);
        out.extend_from_slice(&self.var_state);
        out.push(self.prec_state);
        out.extend([self.var_season_init, self.var_season, self.prec_season]);
        out.extend_from_slice(&self.eta_interaction);
        out.push(self.var_interaction_mean);
        out.extend_from_slice(&self.alpha_interaction);
        out.extend([self.alpha_a, self.alpha_b]);
        out.extend_from_slice(&self.var_interaction);
        out.push(self.prec_interaction);
        out
    }

    /// Inverse of [`to_flat`](Self::to_flat); `None` on a length mismatch.
    pub fn from_flat(dims: Dims, flat: &[f64]) -> Option<Self> {
        if flat.len() != dims.n_params() {
            return None;
        }
        let Dims { r, s, t } = dims;
        let mut rest = flat;
        let mut take = |n: usize| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            head.to_vec()
        };
        let mu_all = take(t);
        let mu_state = take(r * t);
        let mu_season = take(s * t);
        let mu_interaction = take(r * s * t);
        let lambda = take(r);
        let lambda_prec = take(1)[0];
        let v = take(4);
        let w = take(2);
        let var_state = take(r);
        let prec_state = take(1)[0];
        let season = take(3);
        let eta_interaction = take(r);
        let var_interaction_mean = take(1)[0];
        let alpha_interaction = take(r);
        let ab = take(2);
        let var_interaction = take(r * t);
        let prec_interaction = take(1)[0];
        Some(ModelState {
            dims,
            mu_all,
            mu_state,
            mu_season,
            mu_interaction,
            lambda,
            lambda_prec,
            var_all_init: v[0],
            var_all: v[1],
            prec_all_init: v[2],
            prec_all: v[3],
            var_state_init: w[0],
            prec_state_init: w[1],
            var_state,
            prec_state,
            var_season_init: season[0],
            var_season: season[1],
            prec_season: season[2],
            eta_interaction,
            var_interaction_mean,
            alpha_interaction,
            alpha_a: ab[0],
            alpha_b: ab[1],
            var_interaction,
            prec_interaction,
        })
    }

    /// Names of the flat parameters, 1-based indices in brackets.
    pub fn names(dims: Dims) -> Vec<String> {
        let Dims { r, s, t } = dims;
        let mut names = Vec::with_capacity(dims.n_params());
        names.extend((1..=t).map(|j| format!("mu_all[{j}]")));
        for i in 1..=r {
            names.extend((1..=t).map(|j| format!("mu_state[{i},{j}]")));
        }
        for k in 1..=s {
            names.extend((1..=t).map(|j| format!("mu_season[{k},{j}]")));
        }
        for i in 1..=r {
            for k in 1..=s {
                names.extend((1..=t).map(|j| format!("mu_interaction[{i},{k},{j}]")));
            }
        }
        names.extend((1..=r).map(|i| format!("lambda[{i}]")));
        names.push("lambda_prec".into());
        for n in ["var_all_init", "var_all", "prec_all_init", "prec_all", "var_state_init", "prec_state_init"] {
            names.push(n.into());
        }
        names.extend((1..=r).map(|i| format!("var_state[{i}]")));
        for n in ["prec_state", "var_season_init", "var_season", "prec_season"] {
            names.push(n.into());
        }
        names.extend((1..=r).map(|i| format!("eta_interaction[{i}]")));
        names.push("var_interaction_mean".into());
        names.extend((1..=r).map(|i| format!("alpha_interaction[{i}]")));
        names.push("alpha_a".into());
        names.push("alpha_b".into());
        for i in 1..=r {
            names.extend((1..=t).map(|j| format!("var_interaction[{i},{j}]")));
        }
        names.push("prec_interaction".into());
        names
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::density::logit;

    #[test]
    fn zero_components_give_one_half() {
        let st = ModelState::neutral(Dims::new(2, 2, 3));
        assert_eq!(st.theta(1, 1, 2), 0.5);
    }

    #[test]
    fn single_component_inverts_logit() {
        let mut st = ModelState::neutral(Dims::new(2, 2, 3));
        st.mu_all[1] = logit(0.02);
        assert!((st.theta(0, 1, 1) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn theta_increases_with_common_curve() {
        let mut st = ModelState::neutral(Dims::new(1, 1, 2));
        st.mu_all[0] = -5.0;
        let mut last = st.theta(0, 0, 0);
        for k in 1..20 {
            st.mu_all[0] = -5.0 + 0.5 * k as f64;
            let now = st.theta(0, 0, 0);
            assert!(now > last);
            last = now;
        }
    }

    #[test]
    fn flat_layout_roundtrips() {
        let dims = Dims::new(3, 2, 4);
        let mut st = ModelState::neutral(dims);
        let flat: Vec<f64> = (0..dims.n_params()).map(|i| i as f64 + 0.5).collect();
        st = ModelState::from_flat(dims, &flat).unwrap_or(st);
        assert_eq!(st.to_flat(), flat);
        assert_eq!(ModelState::names(dims).len(), dims.n_params());
        assert!(ModelState::from_flat(dims, &flat[1..]).is_none());
    }
}
