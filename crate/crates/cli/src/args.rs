use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dante", version, about = "Multiscale influenza forecasting and FluSight scoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean ILINet rows into a state panel CSV.
    Clean(CleanArgs),
    /// Fit the model by MCMC and write a draws checkpoint.
    Fit(FitArgs),
    /// Write FluSight forecast CSVs for every location.
    Forecast(ForecastArgs),
    /// Score FluSight CSVs against observed data.
    Score(ScoreArgs),
    /// Run the leave-one-season-out evaluation and write a report.
    Evaluate(EvaluateArgs),
    /// Standardized volatility per region and season.
    Volatility(VolatilityArgs),
    /// Run the sampler and scorer self-checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Configuration override such as `mcmc.n_iterations=2000`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Seed for MCMC and predictive draws; overrides `mcmc.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// ILINet CSV (state rows, optionally regional/national rows).
    #[arg(long)]
    pub input: PathBuf,
    /// Census weights CSV: `state,hhs_region,population`.
    #[arg(long)]
    pub weights: PathBuf,
    /// First season start year; defaults to the earliest season in the data.
    #[arg(long)]
    pub first_season: Option<i32>,
    /// Number of seasons; defaults to every season through the latest in the data.
    #[arg(long)]
    pub n_seasons: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CleanArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Season (start year) to hold out beyond `--nobs` weeks.
    #[arg(long, requires = "nobs")]
    pub season: Option<i32>,
    /// Observed weeks of the held-out season.
    #[arg(long, requires = "season")]
    pub nobs: Option<usize>,
    /// Draws checkpoint to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Regional/national baselines CSV; enables onset targets.
    #[arg(long)]
    pub baselines: Option<PathBuf>,
    /// Season (start year) to forecast.
    #[arg(long)]
    pub season: i32,
    /// Weeks of the season observed.
    #[arg(long)]
    pub nobs: usize,
    /// Draws checkpoint from `fit`; the model is fitted here when absent.
    #[arg(long)]
    pub draws: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Baselines CSV for regional/national onset and windows.
    #[arg(long)]
    pub baselines: Option<PathBuf>,
    /// A forecast CSV named `<model>_<season>_<nobs>.csv`, or a directory of them.
    #[arg(long)]
    pub forecasts: PathBuf,
    /// Score table CSV to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub baselines: Option<PathBuf>,
    /// Report directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VolatilityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Geweke cycles.
    #[arg(long, default_value_t = 10_000)]
    pub cycles: usize,
}
