use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use signtypes::experiment::run_holdout_experiment;
use signtypes::model::{fit, Solver};
use signtypes::{ExperimentConfig, FeatureExtractor, FeatureRecipe, FitOptions, Sign};
use signtypes_bench::masked_fixture;

fn solvers(c: &mut Criterion) {
    let (g, _) = masked_fixture(5_000, 60_000);
    let fx = FeatureExtractor::new(&g).unwrap();
    let recipe: FeatureRecipe = "bntk+bnp+triad".parse().unwrap();
    let train = g.observed_edges();
    let x = fx.design(&recipe, &train);
    let y: Vec<f64> = train
        .iter()
        .map(|&e| if g.sign(e) == Sign::Positive { 1.0 } else { 0.0 })
        .collect();
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    for (name, solver) in [("lbfgs", Solver::Lbfgs), ("gradient_descent", Solver::GradientDescent)] {
        let opts = FitOptions {
            solver,
            max_iterations: 500,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(fit(&x, &y, opts, Vec::new()).unwrap()))
        });
    }
    group.finish();
}

fn holdout_repeat(c: &mut Criterion) {
    let (g, h) = masked_fixture(3_000, 30_000);
    let full = g.restore(&h);
    let recipes: Vec<FeatureRecipe> = ["bntc+bnp+triad", "bntk+bnp+triad"].iter().map(|r| r.parse().unwrap()).collect();
    let config = ExperimentConfig {
        seeds: vec![1],
        ..Default::default()
    };
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    group.bench_function("one_repeat_two_recipes", |b| {
        b.iter(|| black_box(run_holdout_experiment(&full, "synthetic", &recipes, &config).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, solvers, holdout_repeat);
criterion_main!(benches);
