//! Multiscale influenza forecasting with a hierarchical Bayesian state-space
//! model.
//!
//! State-level ILI proportions are modeled as Beta observations around a
//! latent logit-scale process built from four random-walk components (a
//! common curve, state and season deviations, and a state-by-season
//! interaction). Posterior draws are obtained by adaptive
//! Metropolis-within-Gibbs, state trajectories are aggregated bottom-up to
//! HHS regions and the nation with census weights, and forecasts are scored
//! with the FluSight multibin log score.
//!
//! Module map:
//! * [`epidata`]: ILINet ingestion, cleaning, season calendar, census weights,
//!   scorability and volatility summaries.
//! * [`model`]: parameter state, densities, likelihood, prior and prior
//!   simulation.
//! * [`sampler`]: the MCMC engine, diagnostics and the Geweke joint test.
//! * [`forecast`]: posterior-predictive trajectories, aggregation and the
//!   FluSight CSV format.
//! * [`scoring`]: target extraction, binning, padding, multibin scoring,
//!   evaluation windows.
//! * [`evaluation`]: leave-one-season-out orchestration and summary tables.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod epidata;
pub mod error;
pub mod evaluation;
pub mod forecast;
pub mod model;
pub mod sampler;
pub mod scoring;

pub use config::Config;
pub use epidata::{IliPanel, SeasonCalendar, WeightMatrix};
pub use error::{DanteError, Result};
pub use forecast::{ForecastJob, Scale, TrajectoryDraws};
pub use model::{Dims, Hyperconfig, ModelState, Observations};
pub use sampler::{McmcConfig, PosteriorDraws};
pub use scoring::{ScoreRecord, SeasonTruth, TargetDistribution, TargetKind};
