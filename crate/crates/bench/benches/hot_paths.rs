use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dante_bench::{synthetic_fit, synthetic_states, synthetic_weights};
use dante_core::forecast::{aggregate, ForecastJob};
use dante_core::model::{log_joint, Dims, Hyperconfig};
use dante_core::sampler::{chain_rng, Chain, McmcConfig};
use dante_core::scoring::{multibin_score, target_distributions, BinScheme, TargetDistribution, TargetKind, TruthValue};

fn bench_log_joint(c: &mut Criterion) {
    let hyper = Hyperconfig::default();
    let (state, obs) = synthetic_fit(Dims::new(10, 7, 35), 3);
    c.bench_function("log_joint 10x7x35", |b| {
        b.iter(|| log_joint(black_box(&state), black_box(&obs), &hyper).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let hyper = Hyperconfig::default();
    let cfg = McmcConfig::default();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(20);
    for dims in [Dims::new(3, 2, 10), Dims::new(10, 7, 35)] {
        let (state, obs) = synthetic_fit(dims, 4);
        let mut chain = Chain::from_state(state, obs, &hyper, &cfg, chain_rng(4, 0));
        group.bench_function(format!("{}x{}x{}", dims.r, dims.s, dims.t), |b| b.iter(|| chain.sweep()));
    }
    group.finish();
}

fn bench_multibin(c: &mut Criterion) {
    let n = BinScheme::Percent.n_bins();
    let probs = vec![1.0 / n as f64; n];
    let dist = TargetDistribution::new(TargetKind::WeekAhead(1), BinScheme::Percent, probs).unwrap();
    c.bench_function("multibin percent", |b| {
        b.iter(|| multibin_score(black_box(&dist), &TruthValue::Percent(2.5)).unwrap())
    });
    let weights = synthetic_weights();
    let states = synthetic_states(&weights, 35, 1000);
    c.bench_function("target distributions 1000 draws", |b| {
        b.iter(|| target_distributions(black_box(&states), 0, 10, Some(2.0)).unwrap())
    });
}

fn bench_aggregation(c: &mut Criterion) {
    let weights = synthetic_weights();
    let states = synthetic_states(&weights, 35, 1000);
    let job = ForecastJob::new(0, 0, 1);
    c.bench_function("aggregate 50 states 1000 draws", |b| {
        b.iter(|| aggregate(black_box(&states), &weights, &job).unwrap())
    });
}

criterion_group!(benches, bench_log_joint, bench_sweep, bench_multibin, bench_aggregation);
criterion_main!(benches);
