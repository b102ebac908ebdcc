//! Posterior-predictive trajectories at the state scale and their
//! bottom-up aggregation to HHS regions and the nation.

pub mod flusight;
pub mod trajectories;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use flusight::{read_flusight_csv, week_labels, write_flusight_csv, LocationForecast};
pub use trajectories::{read_trajectories, write_trajectories};

use crate::epidata::{IliPanel, WeightMatrix, NATIONAL};
use crate::error::{DanteError, Result};
use crate::model::density::sample_beta;
use crate::model::likelihood::beta_shapes;
use crate::model::Hyperconfig;
use crate::sampler::{chain_rng, PosteriorDraws};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    State,
    Region,
    National,
}

impl Scale {
    pub fn of_location(name: &str) -> Scale {
        if name == NATIONAL {
            Scale::National
        } else {
            Scale::Region
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::State => "state",
            Scale::Region => "region",
            Scale::National => "national",
        })
    }
}

impl FromStr for Scale {
    type Err = DanteError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "state" => Ok(Scale::State),
            "region" => Ok(Scale::Region),
            "national" => Ok(Scale::National),
            other => Err(DanteError::Config(format!("unknown scale {other:?}"))),
        }
    }
}

/// One forecast: season index `season` (0-based) with its first `nobs`
/// weeks observed.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastJob {
    pub season: usize,
    pub nobs: usize,
    /// Seed for predictive draws.
    pub seed: u64,
    /// Reported regional/national proportions for the observed weeks, keyed
    /// by location name.
    pub observed_aggregates: HashMap<String, Vec<Option<f64>>>,
}

impl ForecastJob {
    pub fn new(season: usize, nobs: usize, seed: u64) -> Self {
        ForecastJob { season, nobs, seed, observed_aggregates: HashMap::new() }
    }

    /// Takes the first `nobs` weeks of `season` for every location of an
    /// aggregate panel.
    pub fn with_aggregates(mut self, aggregates: &IliPanel) -> Self {
        for (i, name) in aggregates.region_names.iter().enumerate() {
            let series = aggregates.series(i, self.season);
            let prefix = series.iter().take(self.nobs).copied().collect();
            self.observed_aggregates.insert(name.clone(), prefix);
        }
        self
    }

    pub fn validate(&self, n_seasons: usize, n_weeks: usize) -> Result<()> {
        if self.season >= n_seasons {
            return Err(DanteError::Config(format!(
                "forecast season index {} outside the {n_seasons} seasons",
                self.season
            )));
        }
        if self.nobs == 0 || self.nobs >= n_weeks {
            return Err(DanteError::Config(format!(
                "nobs must lie in 1..{n_weeks}, got {}",
                self.nobs
            )));
        }
        Ok(())
    }
}

/// Draws of weekly proportions for a set of locations, stored
/// `[location][week][draw]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDraws {
    pub locations: Vec<String>,
    pub scales: Vec<Scale>,
    pub n_weeks: usize,
    pub n_draws: usize,
    values: Vec<f64>,
}

impl TrajectoryDraws {
    pub fn zeros(locations: Vec<String>, scales: Vec<Scale>, n_weeks: usize, n_draws: usize) -> Self {
        assert_eq!(locations.len(), scales.len());
        let n = locations.len() * n_weeks * n_draws;
        TrajectoryDraws { locations, scales, n_weeks, n_draws, values: vec![0.0; n] }
    }

    pub fn from_values(
        locations: Vec<String>,
        scales: Vec<Scale>,
        n_weeks: usize,
        n_draws: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != locations.len() * n_weeks * n_draws || locations.len() != scales.len() {
            return Err(DanteError::Consistency("trajectory dimensions do not match values".into()));
        }
        Ok(TrajectoryDraws { locations, scales, n_weeks, n_draws, values })
    }

    pub fn n_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    /// `t` is 0-based.
    pub fn get(&self, loc: usize, t: usize, m: usize) -> f64 {
        self.values[(loc * self.n_weeks + t) * self.n_draws + m]
    }

    /// All draws at one location and week.
    pub fn week(&self, loc: usize, t: usize) -> &[f64] {
        let start = (loc * self.n_weeks + t) * self.n_draws;
        &self.values[start..start + self.n_draws]
    }

    pub fn week_mut(&mut self, loc: usize, t: usize) -> &mut [f64] {
        let start = (loc * self.n_weeks + t) * self.n_draws;
        &mut self.values[start..start + self.n_draws]
    }

    /// Trajectory of draw `m` at one location.
    pub fn path(&self, loc: usize, m: usize) -> Vec<f64> {
        (0..self.n_weeks).map(|t| self.get(loc, t, m)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn location_block_mut(&mut self, loc: usize) -> &mut [f64] {
        let len = self.n_weeks * self.n_draws;
        &mut self.values[loc * len..(loc + 1) * len]
    }
}

/// Posterior-predictive state trajectories for the forecast season.
///
/// Observed weeks up to `nobs` pass through unchanged; every other week of
/// every draw, including missing observed weeks, is drawn from the Beta
/// predictive. Draw streams are keyed by state so the result does not
/// depend on scheduling.
pub fn predict_states(
    draws: &PosteriorDraws,
    panel: &IliPanel,
    job: &ForecastJob,
    hyper: &Hyperconfig,
) -> Result<TrajectoryDraws> {
    let d = draws.dims;
    if d.r != panel.n_regions() || d.s != panel.n_seasons() || d.t != panel.n_weeks() {
        return Err(DanteError::Consistency("posterior draws do not match the panel dimensions".into()));
    }
    job.validate(d.s, d.t)?;
    if draws.is_empty() {
        return Err(DanteError::Numerical("no posterior draws to forecast from".into()));
    }
    let m_total = draws.len();
    let mut out = TrajectoryDraws::zeros(
        panel.region_names.clone(),
        vec![Scale::State; d.r],
        d.t,
        m_total,
    );
    let block = d.t * m_total;
    out.values
        .par_chunks_mut(block)
        .enumerate()
        .for_each(|(r, chunk)| {
            let mut rng = chain_rng(job.seed, r as u64);
            for t in 0..d.t {
                let observed = if t < job.nobs { panel.get(r, job.season, t) } else { None };
                let cell = &mut chunk[t * m_total..(t + 1) * m_total];
                match observed {
                    Some(y) => cell.fill(y),
                    None => {
                        for (m, st) in draws.draws.iter().enumerate() {
                            let (a, b) = beta_shapes(st.lambda[r], st.pi(r, job.season, t), hyper.beta_floor);
                            cell[m] = sample_beta(&mut rng, a, b);
                        }
                    }
                }
            }
        });
    Ok(out)
}

/// Aggregates state trajectories with census weights.
///
/// After week `nobs` each aggregate draw is `Σ_r w_r y_r`, summed over states
/// in the weight matrix's order. Through week `nobs` the reported aggregate
/// value passes through; where none was reported the weighted state draws
/// are used instead.
pub fn aggregate(
    states: &TrajectoryDraws,
    weights: &WeightMatrix,
    job: &ForecastJob,
) -> Result<TrajectoryDraws> {
    weights.validate()?;
    let order: Vec<usize> = weights
        .states
        .iter()
        .map(|s| {
            states
                .location_index(s)
                .ok_or_else(|| DanteError::Weights(format!("no trajectories for state {s}")))
        })
        .collect::<Result<_>>()?;
    let (nt, nm) = (states.n_weeks, states.n_draws);
    let scales = weights.locations.iter().map(|l| Scale::of_location(l)).collect();
    let mut out = TrajectoryDraws::zeros(weights.locations.clone(), scales, nt, nm);
    for loc in 0..weights.n_locations() {
        let column = weights.column(loc);
        let observed = job.observed_aggregates.get(&weights.locations[loc]);
        let block = out.location_block_mut(loc);
        for t in 0..nt {
            let cell = &mut block[t * nm..(t + 1) * nm];
            let reported = if t < job.nobs {
                observed.and_then(|o| o.get(t).copied().flatten())
            } else {
                None
            };
            match reported {
                Some(y) => cell.fill(y),
                None => {
                    for (m, slot) in cell.iter_mut().enumerate() {
                        *slot = weighted_sum(&column, &order, |r| states.get(r, t, m));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Σ_k w_k y(order_k)` accumulated in `k` order.
pub fn weighted_sum(weights: &[f64], order: &[usize], y: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for (w, &r) in weights.iter().zip(order) {
        acc += w * y(r);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidata::SeasonCalendar;
    use crate::model::{sample_prior, Dims};

    fn weights() -> WeightMatrix {
        WeightMatrix::from_populations(&[
            ("AZ".into(), 9, 6_407_774.0),
            ("CA".into(), 9, 37_320_903.0),
            ("HI".into(), 9, 1_363_963.0),
            ("NV".into(), 9, 2_702_464.0),
            ("AK".into(), 10, 710_231.0),
        ])
        .unwrap()
    }

    fn state_traj(values: &[f64], n_weeks: usize) -> TrajectoryDraws {
        let names: Vec<String> = ["AZ", "CA", "HI", "NV", "AK"].iter().map(|s| s.to_string()).collect();
        let mut v = Vec::new();
        for &x in values {
            v.extend(std::iter::repeat_n(x, n_weeks * 2));
        }
        TrajectoryDraws::from_values(names, vec![Scale::State; 5], n_weeks, 2, v).unwrap()
    }

    #[test]
    fn constant_states_give_constant_aggregates() {
        let s = state_traj(&[0.03; 5], 4);
        let agg = aggregate(&s, &weights(), &ForecastJob::new(0, 1, 1)).unwrap();
        for loc in 0..agg.n_locations() {
            for t in 0..4 {
                for &y in agg.week(loc, t) {
                    assert!((y - 0.03).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn single_state_region_equals_state() {
        let s = state_traj(&[0.01, 0.02, 0.03, 0.04, 0.05], 3);
        let agg = aggregate(&s, &weights(), &ForecastJob::new(0, 1, 1)).unwrap();
        let r10 = agg.location_index("HHS Region 10").unwrap();
        assert_eq!(agg.get(r10, 2, 1), 0.05);
    }

    #[test]
    fn reported_values_pass_through() {
        let s = state_traj(&[0.01, 0.02, 0.03, 0.04, 0.05], 3);
        let mut job = ForecastJob::new(0, 2, 1);
        job.observed_aggregates.insert("HHS Region 9".into(), vec![Some(0.5), None]);
        let agg = aggregate(&s, &weights(), &job).unwrap();
        let r9 = agg.location_index("HHS Region 9").unwrap();
        assert_eq!(agg.week(r9, 0), &[0.5, 0.5]);
        assert!(agg.get(r9, 1, 0) < 0.05);
    }

    #[test]
    fn predictive_passes_observed_weeks() {
        let hyper = Hyperconfig::default();
        let dims = Dims::new(2, 2, 6);
        let cal = SeasonCalendar::consecutive(2015, 2).with_season_shape(40, 6);
        let mut panel = IliPanel::empty(vec!["A".into(), "B".into()], cal);
        panel.set(0, 1, 0, Some(0.021));
        let states: Vec<_> = (0..5).map(|i| sample_prior(&hyper, dims, i)).collect();
        let draws = PosteriorDraws::new(dims, states, vec![0; 5]);
        let job = ForecastJob::new(1, 2, 7);
        let traj = predict_states(&draws, &panel, &job, &hyper).unwrap();
        assert!(traj.week(0, 0).iter().all(|&y| y == 0.021));
        assert!(traj.values().iter().all(|&y| y > 0.0 && y < 1.0));
        let again = predict_states(&draws, &panel, &job, &hyper).unwrap();
        assert_eq!(traj, again);
    }
}
