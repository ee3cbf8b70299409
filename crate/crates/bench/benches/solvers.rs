use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use isac_bench::{dense_channel, dense_source, linspace};
use isac_core::binary::{closed_form_r, parametric_oracle, BinaryParams};
use isac_core::sim::{run_channel_coding_trial, run_symbolwise_jscc, CodingConfig, JsccConfig};
use isac_core::tradeoff::{rate_distortion, CapacitySolver, ConstraintSet};
use isac_core::{build_binary_isac_channel, ConditionalDistribution, Distribution, SourceSpec};

fn capacity(c: &mut Criterion) {
    let binary = build_binary_isac_channel(0.4).unwrap();
    let solver = CapacitySolver::new(&binary);
    c.bench_function("capacity/binary_ds_0.16", |b| {
        b.iter(|| solver.capacity_distortion_cost(black_box(ConstraintSet::new(0.16, f64::INFINITY).unwrap())))
    });

    let dense = dense_channel();
    let solver = CapacitySolver::new(&dense);
    let floor = solver.floors(f64::INFINITY, None).unwrap().ds_min;
    let top = solver.saturation_distortion(f64::INFINITY).unwrap();
    let grid = linspace(floor, top, 21);
    c.bench_function("capacity/dense_sweep_21", |b| {
        b.iter(|| solver.sweep_curve(f64::INFINITY, black_box(&grid)))
    });
}

fn rate_distortion_solver(c: &mut Criterion) {
    let fair = SourceSpec::hamming(Distribution::uniform(2));
    c.bench_function("rd/bernoulli_half", |b| b.iter(|| rate_distortion(&fair, black_box(0.11))));
    let dense = dense_source();
    let d = 0.5 * (dense.min_distortion() + dense.zero_rate_distortion().1);
    c.bench_function("rd/dense_4x4", |b| b.iter(|| rate_distortion(&dense, black_box(d))));
}

fn binary_forms(c: &mut Criterion) {
    let params = BinaryParams::new(0.4, 0.4).unwrap();
    c.bench_function("binary/closed_form_r", |b| {
        b.iter(|| closed_form_r(&params, black_box(0.2), black_box(0.12)))
    });
    let mut group = c.benchmark_group("binary/parametric_oracle");
    group.sample_size(10);
    for n in [200, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| parametric_oracle(&params, 0.2, 0.12, n))
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let spec = build_binary_isac_channel(0.4).unwrap();
    let mut group = c.benchmark_group("sim");
    group.sample_size(10);
    let coding = CodingConfig {
        n: 20,
        rate: 0.25,
        epsilon: 0.5,
        trials: 200,
        seed: 1,
        input: Distribution::bernoulli_zero(0.4).unwrap(),
        trace: false,
    };
    group.bench_function("random_coding_n20_200_trials", |b| {
        b.iter(|| run_channel_coding_trial(&spec, black_box(&coding)))
    });
    let source = SourceSpec::hamming(Distribution::bernoulli_zero(0.4).unwrap());
    let kernel = ConditionalDistribution::binary(1.0, 0.0).unwrap();
    let jscc = JsccConfig {
        n: 100_000,
        trials: 1,
        seed: 1,
        trace: false,
    };
    group.bench_function("symbolwise_n1e5", |b| {
        b.iter(|| run_symbolwise_jscc(&spec, &source, &kernel, black_box(&jscc)))
    });
    group.finish();
}

criterion_group!(benches, capacity, rate_distortion_solver, binary_forms, simulation);
criterion_main!(benches);
