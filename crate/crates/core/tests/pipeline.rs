use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dante_core::epidata::{SeasonCalendar, WeightMatrix};
use dante_core::evaluation::{emit_report, read_hpd, read_points, read_summary, run_loso, EvaluationData, ExperimentPlan};
use dante_core::forecast::{predict_states, ForecastJob, Scale};
use dante_core::model::density::logit;
use dante_core::model::{sample_prior, simulate_observations, Dims, Hyperconfig, ModelState};
use dante_core::sampler::{McmcConfig, PosteriorDraws};
use dante_core::scoring::{read_scores, Baselines, TargetKind};
use dante_core::IliPanel;

#[test]
fn predictive_draws_follow_the_beta_moments() {
    let dims = Dims::new(2, 1, 6);
    let thetas = [0.01, 0.02, 0.04, 0.08, 0.05, 0.03];
    let lambdas = [50.0, 400.0];
    let mut st = ModelState::neutral(dims);
    for (t, th) in thetas.iter().enumerate() {
        st.mu_all[t] = logit(*th);
    }
    st.lambda = lambdas.to_vec();
    let m = 20_000;
    let draws = PosteriorDraws::new(dims, vec![st; m], vec![0; m]);

    let mut panel = IliPanel::empty(vec!["A".into(), "B".into()], SeasonCalendar::consecutive(2015, 1).with_season_shape(40, 6));
    for r in 0..2 {
        for t in 0..6 {
            panel.set(r, 0, t, Some(0.011 + 0.001 * t as f64));
        }
    }
    panel.set(0, 0, 1, None);
    let nobs = 3;
    let traj = predict_states(&draws, &panel.truncated(0, nobs), &ForecastJob::new(0, nobs, 9), &Hyperconfig::default()).unwrap();

    assert!(traj.week(0, 0).iter().all(|&y| y == 0.011));
    assert!(traj.week(1, 2).iter().all(|&y| y == 0.013));
    for (r, &lambda) in lambdas.iter().enumerate() {
        // Unobserved weeks, including the missing observed week, follow the predictive.
        for t in (1..6).filter(|&t| t >= nobs || (r == 0 && t == 1)) {
            let x = traj.week(r, t);
            let n = x.len() as f64;
            let mean = x.iter().sum::<f64>() / n;
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let th = thetas[t];
            let want_var = th * (1.0 - th) / (lambda + 1.0);
            assert!((mean - th).abs() < 4.0 * (want_var / n).sqrt(), "r{r} t{t}: mean {mean} vs {th}");
            let ratio = var / want_var;
            assert!((0.94..1.06).contains(&ratio), "r{r} t{t}: variance ratio {ratio}");
        }
    }
}

fn plumbing_data() -> EvaluationData {
    let weights = WeightMatrix::from_populations(&[
        ("AZ".into(), 9, 6_407_774.0),
        ("CA".into(), 9, 37_320_903.0),
        ("WA".into(), 10, 6_724_540.0),
        ("OR".into(), 10, 3_831_074.0),
    ])
    .unwrap();
    let hyper = Hyperconfig::default();
    let dims = Dims::new(4, 3, 35);
    let mut truth = sample_prior(&hyper, dims, 21);
    truth.lambda.iter_mut().for_each(|l| *l = 1_500.0);
    let obs = simulate_observations(&truth, &hyper, None, &mut ChaCha8Rng::seed_from_u64(22));
    let mut states = IliPanel::empty(weights.states.clone(), SeasonCalendar::consecutive(2012, 3));
    for r in 0..4 {
        for s in 0..3 {
            for t in 0..35 {
                states.set(r, s, t, obs.get(r, s, t).map(|y| y.clamp(0.0005, 0.9995)));
            }
        }
    }
    let mut baselines = Baselines::default();
    for loc in &weights.locations {
        baselines.insert(loc, 2014, 2.0);
    }
    EvaluationData { states, aggregates: None, weights, baselines }
}

#[test]
fn loso_run_is_complete_and_reproducible() {
    let data = plumbing_data();
    let plan = ExperimentPlan::new("plumbing", vec![2], vec![5, 12]);
    let mcmc = McmcConfig { n_chains: 2, n_iterations: 300, thin: 2, burnin_thinned: 50, adapt_window: 25, ..McmcConfig::default() };
    let hyper = Hyperconfig::default();
    let out = run_loso(&plan, &data, &hyper, &mcmc).unwrap();

    assert_eq!(out.diagnostics.len(), 2);
    assert!(out.diagnostics.iter().all(|d| d.message.is_empty() && d.n_draws == 200), "{:?}", out.diagnostics);
    for nobs in [5, 12] {
        let job: Vec<_> = out.scores.iter().filter(|r| r.forecast_week == nobs).collect();
        let states = job.iter().filter(|r| r.scale == Scale::State).count();
        // Four week-ahead targets plus peak week and intensity, every week, for four states.
        assert_eq!(states, 4 * 6, "nobs {nobs}");
        assert!(job.iter().any(|r| r.scale == Scale::Region));
        assert!(job.iter().any(|r| r.scale == Scale::National));
    }
    assert!(out.scores.iter().all(|r| r.season == 2014 && r.skill > 0.0 && r.skill <= 1.0 + 1e-12));
    assert!(out.scores.iter().any(|r| r.target == TargetKind::Onset));
    assert_eq!(out.hpd.len(), out.scores.len());
    assert!(!out.points.is_empty());

    let again = run_loso(&plan, &data, &hyper, &mcmc).unwrap();
    assert_eq!(again, out);

    let dir = tempfile::tempdir().unwrap();
    emit_report(&out, None, dir.path()).unwrap();
    assert_eq!(read_scores(&dir.path().join("scores.csv")).unwrap(), out.scores);
    assert_eq!(read_points(&dir.path().join("mse.csv")).unwrap(), out.points);
    assert_eq!(read_hpd(&dir.path().join("hpd.csv")).unwrap(), out.hpd);
    let summary = read_summary(&dir.path().join("summary.csv")).unwrap();
    for scale in ["state", "region", "national"] {
        assert!(summary.iter().any(|r| r.metric == "skill" && r.grouping == "scale" && r.group == scale));
    }
}
