//! Benchmark suite: the grid runner under its two schedules (rayon
//! data-parallel vs forced-sequential), plus per-kind single-step costs.
//! Build with `--no-default-features` to measure the fallback build's
//! `run_grid` as well.

use criterion::{criterion_group, criterion_main, Criterion};
use ridgelab::harness::{run_grid, run_grid_sequential, AlgorithmSpec, ExperimentConfig, MetricSet};
use ridgelab::problems;
use ridgelab::solvers::{IzInit, SolverKind, SolverState};

fn bench_config() -> ExperimentConfig {
    let mut metrics = MetricSet::none();
    metrics.err_beta = true;
    ExperimentConfig {
        dims: vec![(120, 30), (30, 120)],
        lambdas: vec![0.01],
        sigma_mins: vec![0.1],
        algorithms: vec![
            AlgorithmSpec::parse("rk-ridge").unwrap(),
            AlgorithmSpec::parse("rgs-ridge").unwrap(),
            AlgorithmSpec::parse("iz:iz0").unwrap(),
        ],
        iterations: 500,
        trace_every: 250,
        trials: 4,
        base_seed: 0,
        metrics,
    }
}

fn grid_schedules(c: &mut Criterion) {
    let config = bench_config();
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    group.bench_function("default-schedule", |b| {
        b.iter(|| run_grid(&config).unwrap().records.len())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| run_grid_sequential(&config).unwrap().records.len())
    });
    group.finish();
}

fn solver_steps(c: &mut Criterion) {
    let p = problems::generate(400, 100, 0.1, 0.01, 1).unwrap();
    let mut group = c.benchmark_group("step");
    for (label, kind, init) in [
        ("rk-ridge", SolverKind::RkRidge, None),
        ("rgs-ridge", SolverKind::RgsRidge, None),
        ("naive-rgs", SolverKind::NaiveRgsNormal, None),
        ("iz", SolverKind::Iz, Some(IzInit::Mixed)),
    ] {
        let mut state = SolverState::init(kind, &p, init, 2).unwrap();
        group.bench_function(label, |b| b.iter(|| state.step(&p).delta_magnitude));
    }
    group.finish();
}

criterion_group!(benches, grid_schedules, solver_steps);
criterion_main!(benches);
