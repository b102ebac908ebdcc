use std::path::{Path, PathBuf};

use serde::Serialize;

use dante_core::epidata::{reconstruct_aggregates, standardized_volatility};
use dante_core::evaluation::{
    emit_report, job_seed, run_loso, summarize, write_volatility, EvaluationData, ExperimentPlan, ScoringContext,
};
use dante_core::forecast::{
    aggregate, predict_states, week_labels, write_flusight_csv, write_trajectories, LocationForecast,
};
use dante_core::model::{sample_prior, Dims, ModelState, Observations};
use dante_core::sampler::{geweke_joint_test, read_draws, run_chains, write_draws};
use dante_core::scoring::{
    average_scores, evaluation_window, multibin_score, target_distributions, write_scores,
    BinScheme, ScoreRecord, SeasonTruth, TargetDistribution, TruthValue,
};
use dante_core::{Config, DanteError, ForecastJob, IliPanel, McmcConfig, PosteriorDraws, Scale, TargetKind, TrajectoryDraws};

use crate::args::{CleanArgs, EvaluateArgs, FitArgs, ForecastArgs, ScoreArgs, SelfcheckArgs, VolatilityArgs};
use crate::data::{load_baselines, load_config, load_inputs, season_index, Inputs};
use crate::{CliError, CliResult};

#[derive(Serialize)]
struct CleanRow<'a> {
    region: &'a str,
    season: i32,
    week: usize,
    year: i32,
    epiweek: u32,
    ili: Option<f64>,
}

fn write_panel(w: &mut csv::Writer<std::fs::File>, panel: &IliPanel) -> CliResult<()> {
    for (r, region) in panel.region_names.iter().enumerate() {
        for (s, &season) in panel.season_labels().iter().enumerate() {
            for t in 0..panel.n_weeks() {
                let (year, epiweek) = panel.calendar.to_epiweek(season, t + 1);
                let row = CleanRow { region, season, week: t + 1, year, epiweek, ili: panel.get(r, s, t) };
                w.serialize(row).map_err(DanteError::from)?;
            }
        }
    }
    Ok(())
}

pub fn clean(a: CleanArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    let inputs = load_inputs(&cfg, &a.data)?;
    let mut w = csv::Writer::from_path(&a.out).map_err(DanteError::from)?;
    write_panel(&mut w, &inputs.states)?;
    if let Some(agg) = &inputs.aggregates {
        write_panel(&mut w, agg)?;
    }
    w.flush().map_err(|e| DanteError::io(&a.out, e))?;
    println!(
        "{} states x {} seasons x {} weeks, {} present",
        inputs.states.n_regions(),
        inputs.states.n_seasons(),
        inputs.states.n_weeks(),
        inputs.states.n_present()
    );
    Ok(())
}

fn fit_panel(panel: &IliPanel, cfg: &Config, seed: u64) -> CliResult<PosteriorDraws> {
    let mcmc = McmcConfig { seed, ..cfg.mcmc };
    let draws = run_chains(&Observations::from_panel(panel), &cfg.model, &mcmc)?;
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.3}"));
    eprintln!(
        "{} draws from {} chains; max R-hat {}, min ESS {}",
        draws.len(),
        draws.n_chains(),
        fmt(draws.diagnostics.max_rhat()),
        fmt(draws.diagnostics.min_ess())
    );
    Ok(draws)
}

/// Training panel and seed for a held-out (season, nobs) job.
fn holdout(inputs: &Inputs, cfg: &Config, season: i32, nobs: usize) -> CliResult<(usize, IliPanel, u64)> {
    let s = season_index(inputs, season)?;
    if nobs == 0 || nobs >= inputs.states.n_weeks() {
        return Err(CliError::Usage(format!("--nobs must lie in 1..{}", inputs.states.n_weeks())));
    }
    Ok((s, inputs.states.truncated(s, nobs), job_seed(cfg.mcmc.seed, s, nobs)))
}

pub fn fit(a: FitArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    let inputs = load_inputs(&cfg, &a.data)?;
    let (panel, seed) = match (a.season, a.nobs) {
        (Some(season), Some(nobs)) => {
            let (_, panel, seed) = holdout(&inputs, &cfg, season, nobs)?;
            (panel, seed)
        }
        _ => (inputs.states.clone(), cfg.mcmc.seed),
    };
    let draws = fit_panel(&panel, &cfg, seed)?;
    write_draws(&draws, &a.out)?;
    Ok(())
}

pub fn forecast_file_stem(model: &str, season: i32, nobs: usize) -> String {
    format!("{model}_{season}_{nobs:02}")
}

/// Splits `<model>_<season>_<nobs>.csv` into its parts.
fn parse_forecast_name(path: &Path) -> Option<(String, i32, usize)> {
    let stem = path.file_name()?.to_str()?.strip_suffix(".csv")?;
    let mut parts = stem.rsplitn(3, '_');
    let nobs = parts.next()?.parse().ok()?;
    let season = parts.next()?.parse().ok()?;
    let model = parts.next()?.to_string();
    Some((model, season, nobs))
}

fn concat(a: &TrajectoryDraws, b: &TrajectoryDraws) -> CliResult<TrajectoryDraws> {
    let locations = a.locations.iter().chain(&b.locations).cloned().collect();
    let scales = a.scales.iter().chain(&b.scales).copied().collect();
    let values = a.values().iter().chain(b.values()).copied().collect();
    Ok(TrajectoryDraws::from_values(locations, scales, a.n_weeks, a.n_draws, values)?)
}

pub fn forecast(a: ForecastArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    let inputs = load_inputs(&cfg, &a.data)?;
    let baselines = load_baselines(a.baselines.as_deref())?;
    let (s, training, seed) = holdout(&inputs, &cfg, a.season, a.nobs)?;
    let draws = match &a.draws {
        Some(path) => read_draws(path)?,
        None => fit_panel(&training, &cfg, seed)?,
    };
    let mut job = ForecastJob::new(s, a.nobs, seed);
    if let Some(agg) = &inputs.aggregates {
        job = job.with_aggregates(agg);
    }
    let states = predict_states(&draws, &training, &job, &cfg.model)?;
    let aggregates = aggregate(&states, &inputs.weights, &job)?;
    let all = concat(&states, &aggregates)?;
    let mut forecasts = Vec::with_capacity(all.n_locations());
    for (loc, name) in all.locations.iter().enumerate() {
        let baseline = match all.scales[loc] {
            Scale::State => None,
            _ => baselines.get(name, a.season),
        };
        let targets = target_distributions(&all, loc, a.nobs, baseline)?;
        forecasts.push(LocationForecast { location: name.clone(), targets });
    }
    std::fs::create_dir_all(&a.out).map_err(|e| DanteError::io(&a.out, e))?;
    let stem = forecast_file_stem(&cfg.evaluation.model_label, a.season, a.nobs);
    let csv_path = a.out.join(format!("{stem}.csv"));
    write_flusight_csv(&forecasts, &week_labels(&inputs.calendar, a.season), &csv_path)?;
    write_trajectories(&all, &a.out.join(format!("{stem}.traj")))?;
    println!("{}", csv_path.display());
    Ok(())
}

fn forecast_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = std::fs::read_dir(path).map_err(|e| DanteError::io(path, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let p = entry.map_err(|e| DanteError::io(path, e))?.path();
        if parse_forecast_name(&p).is_some() {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn plan_from(cfg: &Config, model: &str, seasons: Vec<usize>, nobs: Vec<usize>) -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(model, seasons, nobs);
    plan.hpd_level = cfg.evaluation.hpd_level;
    plan.percent_point = cfg.evaluation.percent_point;
    plan
}

fn print_averages(records: &[ScoreRecord]) {
    for scale in [Scale::State, Scale::Region, Scale::National] {
        if let Some(avg) = average_scores(records.iter().filter(|r| r.scale == scale)) {
            println!("{scale}\t{avg:.4}");
        }
    }
    if let Some(avg) = average_scores(records) {
        println!("overall\t{avg:.4}");
    }
}

pub fn score(a: ScoreArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    let inputs = load_inputs(&cfg, &a.data)?;
    let files = forecast_files(&a.forecasts)?;
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no <model>_<season>_<nobs>.csv forecasts at {}",
            a.forecasts.display()
        )));
    }
    let aggregates = match &inputs.aggregates {
        Some(p) => p.clone(),
        None => reconstruct_aggregates(&inputs.states, &inputs.weights)?,
    };
    let data = EvaluationData {
        states: inputs.states.clone(),
        aggregates: inputs.aggregates.clone(),
        weights: inputs.weights.clone(),
        baselines: load_baselines(a.baselines.as_deref())?,
    };
    let mut records = Vec::new();
    for path in files {
        let (model, season, nobs) = parse_forecast_name(&path)
            .ok_or_else(|| CliError::Usage(format!("{} is not named <model>_<season>_<nobs>.csv", path.display())))?;
        let s = season_index(&inputs, season)?;
        let plan = plan_from(&cfg, &model, vec![s], vec![nobs]);
        let ctx = ScoringContext::new(&plan, &data, &aggregates);
        let labels = week_labels(&inputs.calendar, season);
        for f in dante_core::forecast::read_flusight_csv(&path, &labels)? {
            records.extend(ctx.score_forecast(&f.location, s, nobs, &f.targets)?.scores);
        }
    }
    write_scores(&records, &a.out)?;
    print_averages(&records);
    Ok(())
}

pub fn evaluate(a: EvaluateArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    let inputs = load_inputs(&cfg, &a.data)?;
    let seasons: Vec<usize> = if cfg.evaluation.seasons.is_empty() {
        (2..inputs.states.n_seasons()).collect()
    } else {
        cfg.evaluation
            .seasons
            .iter()
            .map(|&y| season_index(&inputs, y))
            .collect::<CliResult<_>>()?
    };
    if seasons.is_empty() {
        return Err(CliError::Usage("no seasons to evaluate; at least three are needed by default".into()));
    }
    let nobs = (cfg.evaluation.first_nobs..=cfg.evaluation.last_nobs).collect();
    let plan = plan_from(&cfg, &cfg.evaluation.model_label, seasons, nobs);
    let data = EvaluationData {
        states: inputs.states.clone(),
        aggregates: inputs.aggregates.clone(),
        weights: inputs.weights.clone(),
        baselines: load_baselines(a.baselines.as_deref())?,
    };
    let out = run_loso(&plan, &data, &cfg.model, &cfg.mcmc)?;
    let failed = out.diagnostics.iter().filter(|d| !d.message.is_empty()).count();
    let volatility = standardized_volatility(&inputs.states).with_patient_means(&inputs.rows);
    emit_report(&out, Some(&volatility), &a.out)?;
    print_averages(&out.scores);
    let table = summarize(&out);
    if let Some(mse) = table.get(&plan.model, "mse", "scale", "national") {
        println!("national mse\t{mse:.4}");
    }
    if failed > 0 {
        eprintln!("{failed} of {} jobs failed; see diagnostics.csv", plan.jobs().len());
        if out.scores.is_empty() {
            return Err(DanteError::Numerical("every evaluation job failed".into()).into());
        }
    }
    Ok(())
}

pub fn volatility(a: VolatilityArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    let inputs = load_inputs(&cfg, &a.data)?;
    let mut panel = inputs.states.clone();
    if let Some(agg) = &inputs.aggregates {
        panel = stack(&panel, agg);
    }
    let report = standardized_volatility(&panel).with_patient_means(&inputs.rows);
    write_volatility(&report, &a.out)?;
    Ok(())
}

/// States followed by aggregate rows, over the same calendar.
fn stack(states: &IliPanel, aggregates: &IliPanel) -> IliPanel {
    let names = states.region_names.iter().chain(&aggregates.region_names).cloned().collect();
    let mut out = IliPanel::empty(names, states.calendar.clone());
    for (offset, p) in [(0, states), (states.n_regions(), aggregates)] {
        for r in 0..p.n_regions() {
            for s in 0..p.n_seasons() {
                for t in 0..p.n_weeks() {
                    out.set(offset + r, s, t, p.get(r, s, t));
                }
            }
        }
    }
    out
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn golden_scorer() -> Check {
    let mut traj = vec![Some(1.0); 35];
    for v in &mut traj[7..20] {
        *v = Some(4.0);
    }
    let truth = SeasonTruth::from_percent(&traj, Some(3.2));
    let window = evaluation_window(TargetKind::Onset, &truth, Scale::Region);
    let skills = [0.27, 0.22, 0.10, 0.68, 0.99, 0.99, 0.99, 0.99, 0.99, 0.99];
    let records: Vec<ScoreRecord> = (window.0..=window.1)
        .map(|w| {
            let skill = skills.get(w - 5).copied().unwrap_or(0.0);
            ScoreRecord::new("golden", "HHS Region 6", Scale::Region, 2014, TargetKind::Onset, w, skill)
        })
        .collect();
    let avg = average_scores(&records).unwrap_or(f64::NAN);
    Check {
        name: "scorer golden example",
        pass: window == (5, 14) && (avg - 0.57).abs() <= 0.005,
        detail: format!("window {window:?}, skill {avg:.4}"),
    }
}

fn golden_multibin() -> Check {
    let mut probs = vec![0.0; BinScheme::Percent.n_bins()];
    // Mass just inside and just outside the ±0.5 window around 2.5%.
    probs[20] = 0.25;
    probs[30] = 0.25;
    probs[19] = 0.25;
    probs[31] = 0.25;
    let d = TargetDistribution { kind: TargetKind::WeekAhead(1), scheme: BinScheme::Percent, probs };
    let got = multibin_score(&d, &TruthValue::Percent(2.5)).unwrap_or(f64::NAN);
    Check { name: "multibin window", pass: got == 0.5, detail: format!("2.5% window mass {got}") }
}

fn prior_moments(cfg: &Config) -> Check {
    let dims = Dims::new(2, 2, 6);
    let mcmc = McmcConfig { n_chains: 2, n_iterations: 40_000, thin: 5, burnin_thinned: 1_000, ..cfg.mcmc };
    let draws = match run_chains(&Observations::all_missing(dims), &cfg.model, &mcmc) {
        Ok(d) => d,
        Err(e) => return Check { name: "prior recovery", pass: false, detail: e.to_string() },
    };
    let n_prior = 20_000u64;
    let direct: Vec<ModelState> = (0..n_prior).map(|i| sample_prior(&cfg.model, dims, 1_000_000 + i)).collect();
    let names = ModelState::names(dims);
    let j = names.iter().position(|n| n == "lambda_prec").expect("lambda_prec is a parameter");
    let ess = draws.diagnostics.params[j].ess;
    let chain: Vec<f64> = draws.draws.iter().map(|s| s.lambda_prec).collect();
    let prior: Vec<f64> = direct.iter().map(|s| s.lambda_prec).collect();
    let (m1, v1) = mean_var(&chain);
    let (m2, v2) = mean_var(&prior);
    let z = (m1 - m2) / (v1 / ess + v2 / n_prior as f64).sqrt();
    Check {
        name: "prior recovery",
        pass: z.abs() < 4.0,
        detail: format!("lambda_prec {m1:.4} vs {m2:.4}, z {z:+.2}"),
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
}

fn geweke(cfg: &Config, cycles: usize) -> Check {
    let mcmc = McmcConfig { thin: cfg.mcmc.thin.max(20), ..cfg.mcmc };
    match geweke_joint_test(&cfg.model, &mcmc, Dims::new(2, 2, 6), cycles) {
        Ok(moments) => {
            let worst = moments.iter().max_by(|a, b| a.z.abs().total_cmp(&b.z.abs()));
            Check {
                name: "geweke joint test",
                pass: moments.iter().all(|m| m.z.abs() < 4.0),
                detail: worst.map_or_else(String::new, |m| format!("{} moments, worst {} z {:+.2}", moments.len(), m.name, m.z)),
            }
        }
        Err(e) => Check { name: "geweke joint test", pass: false, detail: e.to_string() },
    }
}

pub fn selfcheck(a: SelfcheckArgs) -> CliResult<()> {
    let cfg = load_config(&a.common)?;
    if a.cycles == 0 {
        return Err(CliError::Usage("--cycles must be positive".into()));
    }
    let checks = [golden_scorer(), golden_multibin(), prior_moments(&cfg), geweke(&cfg, a.cycles)];
    let mut failed = Vec::new();
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.pass {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}
