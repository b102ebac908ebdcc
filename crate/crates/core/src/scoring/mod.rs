//! FluSight targets: extraction from trajectories, binning, padding,
//! multibin scoring, evaluation windows and averaging.

pub mod bins;
pub mod extract;
pub mod multibin;
pub mod records;
pub mod targets;
pub mod window;

pub use bins::{BinScheme, TargetDistribution, PERCENT_BINS, PERCENT_PAD, WEEK_PAD};
pub use extract::target_distributions;
pub use multibin::{log_skill, multibin_score, scoring_bins, LOG_SCORE_FLOOR};
pub use records::{average_scores, read_scores, write_scores, Baselines, ScoreRecord};
pub use targets::{compute_onset, compute_peak, round_tenth, SeasonTruth, TargetKind, TruthValue};
pub use window::{evaluation_window, FIRST_FORECAST_WEEK, LAST_FORECAST_WEEK};
