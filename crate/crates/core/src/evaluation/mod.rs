//! Leave-one-season-out experiments and their summary metrics.

pub mod report;
pub mod summary;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{emit_report, read_hpd, read_points, read_summary, write_volatility};
pub use summary::{summarize, SummaryRow, SummaryTable};

use crate::config::PercentPoint;
use crate::epidata::{reconstruct_aggregates, scorable_seasonal_targets, IliPanel, ScorableMask, WeightMatrix};
use crate::error::{DanteError, Result};
use crate::forecast::{aggregate, predict_states, ForecastJob, Scale, TrajectoryDraws};
use crate::model::{Hyperconfig, Observations};
use crate::sampler::{run_chains, McmcConfig, PosteriorDraws};
use crate::scoring::{
    evaluation_window, multibin_score, target_distributions, Baselines, BinScheme, ScoreRecord,
    SeasonTruth, TargetDistribution, TargetKind, TruthValue,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub model: String,
    /// 0-based season indices to forecast.
    pub seasons: Vec<usize>,
    /// Observed-week counts at which forecasts are made.
    pub nobs: Vec<usize>,
    pub scales: Vec<Scale>,
    pub hpd_level: f64,
    pub percent_point: PercentPoint,
}

impl ExperimentPlan {
    pub fn new(model: &str, seasons: Vec<usize>, nobs: Vec<usize>) -> Self {
        ExperimentPlan {
            model: model.to_string(),
            seasons,
            nobs,
            scales: vec![Scale::State, Scale::Region, Scale::National],
            hpd_level: 0.9,
            percent_point: PercentPoint::Mean,
        }
    }

    pub fn jobs(&self) -> Vec<(usize, usize)> {
        self.seasons
            .iter()
            .flat_map(|&s| self.nobs.iter().map(move |&n| (s, n)))
            .collect()
    }
}

/// Everything a leave-one-season-out run reads.
#[derive(Debug, Clone)]
pub struct EvaluationData {
    pub states: IliPanel,
    /// Reported regional/national (w)ILI; reconstructed from states when absent.
    pub aggregates: Option<IliPanel>,
    pub weights: WeightMatrix,
    pub baselines: Baselines,
}

/// Point prediction against truth for one scored forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub model: String,
    pub location: String,
    pub scale: Scale,
    pub season: i32,
    pub target: TargetKind,
    pub forecast_week: usize,
    pub prediction: f64,
    pub squared_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpdRecord {
    pub model: String,
    pub location: String,
    pub scale: Scale,
    pub season: i32,
    pub target: TargetKind,
    pub forecast_week: usize,
    pub level: f64,
    pub width: f64,
}

/// Sampler health for one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub season: i32,
    pub nobs: usize,
    pub n_draws: usize,
    pub max_rhat: Option<f64>,
    pub min_ess: Option<f64>,
    pub n_warnings: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LosoOutput {
    pub scores: Vec<ScoreRecord>,
    pub points: Vec<PointRecord>,
    pub hpd: Vec<HpdRecord>,
    pub diagnostics: Vec<DiagnosticRecord>,
}

impl LosoOutput {
    fn extend(&mut self, other: LosoOutput) {
        self.scores.extend(other.scores);
        self.points.extend(other.points);
        self.hpd.extend(other.hpd);
        self.diagnostics.extend(other.diagnostics);
    }
}

/// Seed of the fit for one (season, nobs) job.
pub fn job_seed(base: u64, season: usize, nobs: usize) -> u64 {
    base.wrapping_add(((season as u64) << 32) | nobs as u64)
}

/// Fits, forecasts and scores every (season, nobs) job of the plan. Jobs
/// run concurrently; a failed fit is recorded in the diagnostics and the
/// run continues.
pub fn run_loso(
    plan: &ExperimentPlan,
    data: &EvaluationData,
    hyper: &Hyperconfig,
    mcmc: &McmcConfig,
) -> Result<LosoOutput> {
    validate_plan(plan, &data.states)?;
    data.weights.validate()?;
    let truth_aggregates = match &data.aggregates {
        Some(a) => a.clone(),
        None => reconstruct_aggregates(&data.states, &data.weights)?,
    };
    let ctx = ScoringContext::new(plan, data, &truth_aggregates);
    let per_job: Vec<LosoOutput> = plan
        .jobs()
        .into_par_iter()
        .map(|(season, nobs)| {
            let label = data.states.season_labels()[season];
            let cfg = McmcConfig { seed: job_seed(mcmc.seed, season, nobs), ..*mcmc };
            let training = data.states.truncated(season, nobs);
            let fit = run_chains(&Observations::from_panel(&training), hyper, &cfg);
            let mut out = LosoOutput::default();
            match fit {
                Ok(draws) => {
                    out.diagnostics.push(diagnostic_record(label, nobs, &draws, String::new()));
                    let mut job = ForecastJob::new(season, nobs, cfg.seed);
                    if let Some(a) = &data.aggregates {
                        job = job.with_aggregates(a);
                    }
                    let scored = predict_states(&draws, &training, &job, hyper)
                        .and_then(|states| {
                            let agg = aggregate(&states, &data.weights, &job)?;
                            ctx.score_job(&states, &agg, season, nobs)
                        });
                    match scored {
                        Ok(s) => out.extend(s),
                        Err(e) => out.diagnostics[0].message = e.to_string(),
                    }
                }
                Err(e) => out.diagnostics.push(DiagnosticRecord {
                    season: label,
                    nobs,
                    n_draws: 0,
                    max_rhat: None,
                    min_ess: None,
                    n_warnings: 0,
                    message: e.to_string(),
                }),
            }
            out
        })
        .collect();
    let mut out = LosoOutput::default();
    for o in per_job {
        out.extend(o);
    }
    Ok(out)
}

fn diagnostic_record(season: i32, nobs: usize, draws: &PosteriorDraws, message: String) -> DiagnosticRecord {
    DiagnosticRecord {
        season,
        nobs,
        n_draws: draws.len(),
        max_rhat: draws.diagnostics.max_rhat(),
        min_ess: draws.diagnostics.min_ess(),
        n_warnings: draws.diagnostics.warnings.len(),
        message,
    }
}

/// Truth and scorability shared by every job.
pub struct ScoringContext<'a> {
    plan: &'a ExperimentPlan,
    states: &'a IliPanel,
    aggregates: &'a IliPanel,
    baselines: &'a Baselines,
    state_mask: ScorableMask,
    aggregate_mask: ScorableMask,
}

fn percent_series(series: &[Option<f64>]) -> Vec<Option<f64>> {
    series.iter().map(|v| v.map(|y| 100.0 * y)).collect()
}

impl<'a> ScoringContext<'a> {
    pub fn new(plan: &'a ExperimentPlan, data: &'a EvaluationData, aggregates: &'a IliPanel) -> Self {
        ScoringContext {
            plan,
            states: &data.states,
            aggregates,
            baselines: &data.baselines,
            state_mask: scorable_seasonal_targets(&data.states),
            aggregate_mask: scorable_seasonal_targets(aggregates),
        }
    }

    /// Scores the state and aggregate trajectories of one job.
    pub fn score_job(
        &self,
        states: &TrajectoryDraws,
        aggregates: &TrajectoryDraws,
        season: usize,
        nobs: usize,
    ) -> Result<LosoOutput> {
        let label = self.states.season_labels()[season];
        let mut out = LosoOutput::default();
        for traj in [states, aggregates] {
            for (loc, name) in traj.locations.iter().enumerate() {
                let scale = traj.scales[loc];
                if !self.plan.scales.contains(&scale) {
                    continue;
                }
                let baseline = if scale == Scale::State { None } else { self.baselines.get(name, label) };
                let dists = target_distributions(traj, loc, nobs, baseline)?;
                out.extend(self.score_forecast(name, season, nobs, &dists)?);
            }
        }
        Ok(out)
    }

    /// Scores ready-made target distributions for one location, applying
    /// the scorability mask and evaluation windows. Locations absent from
    /// the truth panels, or at a scale outside the plan, score nothing.
    pub fn score_forecast(
        &self,
        location: &str,
        season: usize,
        nobs: usize,
        dists: &[TargetDistribution],
    ) -> Result<LosoOutput> {
        let label = self.states.season_labels()[season];
        let scale = if self.states.region_index(location).is_some() {
            Scale::State
        } else {
            Scale::of_location(location)
        };
        let mut out = LosoOutput::default();
        let (panel, mask) = if scale == Scale::State {
            (self.states, &self.state_mask)
        } else {
            (self.aggregates, &self.aggregate_mask)
        };
        let Some(r) = panel.region_index(location) else {
            return Ok(out);
        };
        if !self.plan.scales.contains(&scale) {
            return Ok(out);
        }
        let baseline = if scale == Scale::State { None } else { self.baselines.get(location, label) };
        let truth = SeasonTruth::from_percent(&percent_series(panel.series(r, season)), baseline);
        let seasonal_ok = mask.is_scorable(r, season);
        for dist in dists {
            if dist.kind.is_seasonal() && !seasonal_ok {
                continue;
            }
            let (lo, hi) = evaluation_window(dist.kind, &truth, scale);
            if nobs < lo || nobs > hi {
                continue;
            }
            let Some(value) = truth.value(dist.kind, nobs) else {
                continue;
            };
            self.record(&mut out, location, scale, label, nobs, dist, &value)?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn record(
        &self,
        out: &mut LosoOutput,
        location: &str,
        scale: Scale,
        season: i32,
        nobs: usize,
        dist: &TargetDistribution,
        truth: &TruthValue,
    ) -> Result<()> {
        let model = &self.plan.model;
        let skill = multibin_score(dist, truth)?;
        out.scores.push(ScoreRecord::new(model, location, scale, season, dist.kind, nobs, skill));
        if let Some(prediction) = point_prediction(dist, self.plan.percent_point) {
            if let Some(squared_error) = squared_error(prediction, truth) {
                out.points.push(PointRecord {
                    model: model.clone(),
                    location: location.to_string(),
                    scale,
                    season,
                    target: dist.kind,
                    forecast_week: nobs,
                    prediction,
                    squared_error,
                });
            }
        }
        out.hpd.push(HpdRecord {
            model: model.clone(),
            location: location.to_string(),
            scale,
            season,
            target: dist.kind,
            forecast_week: nobs,
            level: self.plan.hpd_level,
            width: hpd_width(dist, self.plan.hpd_level),
        });
        Ok(())
    }
}

/// Width of the highest-density set of bins holding `level` of the mass.
pub fn hpd_width(dist: &TargetDistribution, level: f64) -> f64 {
    dist.hpd_width(level)
}

/// Point prediction of a distribution. Percent targets use the bin-midpoint
/// mean, or the modal bin's midpoint under [`PercentPoint::Mode`]; week
/// targets use the modal week. `None` when the mode is "no onset".
pub fn point_prediction(dist: &TargetDistribution, percent: PercentPoint) -> Option<f64> {
    match (dist.scheme, percent) {
        (BinScheme::Percent, PercentPoint::Mode) => {
            Some(BinScheme::percent_bin_start(dist.mode()) + 0.05)
        }
        _ => dist.point(),
    }
}

/// Squared error against the truth; against several peak weeks, the
/// nearest one counts. `None` when the truth is "no onset".
pub fn squared_error(prediction: f64, truth: &TruthValue) -> Option<f64> {
    match truth {
        TruthValue::Percent(v) => Some((prediction - v).powi(2)),
        TruthValue::Weeks(weeks) => weeks
            .iter()
            .map(|&w| (prediction - w as f64).powi(2))
            .reduce(f64::min),
        TruthValue::NoOnset => None,
    }
}

/// Season indices and forecast weeks, checked against the panel.
pub fn validate_plan(plan: &ExperimentPlan, panel: &IliPanel) -> Result<()> {
    if let Some(&s) = plan.seasons.iter().find(|&&s| s >= panel.n_seasons()) {
        return Err(DanteError::Config(format!("season index {s} outside the panel")));
    }
    if let Some(&n) = plan.nobs.iter().find(|&&n| n == 0 || n >= panel.n_weeks()) {
        return Err(DanteError::Config(format!("forecast week {n} outside 1..{}", panel.n_weeks())));
    }
    Ok(())
}
