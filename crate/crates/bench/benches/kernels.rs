// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nfl_bench::{chain_fixture, learners, merge_fixture, random_stream};
use nfl_core::category::{meagre_chain, shrink_against};
use nfl_core::extrapolation::error_positions;
use nfl_core::forecasting_eval::merge_depth;

fn bench_error_positions(c: &mut Criterion) {
    let mut g = c.benchmark_group("error_positions");
    for (name, m) in learners() {
        g.bench_with_input(BenchmarkId::new(name, 10_000), &m, |b, m| {
            b.iter(|| {
                let sigma = random_stream(3);
                error_positions(m.as_ref(), &sigma, black_box(10_000)).unwrap()
            })
        });
    }
    g.finish();
}

fn bench_merge_depth(c: &mut Criterion) {
    let (mu, lambda, path) = merge_fixture(200);
    let mut g = c.benchmark_group("merge_depth");
    for d in [2usize, 4, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| merge_depth(mu.as_ref(), lambda.as_ref(), black_box(&path), d).unwrap())
        });
    }
    g.finish();
}

fn bench_chain(c: &mut Criterion) {
    let (mu, w0) = chain_fixture();
    c.bench_function("shrink_against/depth1", |b| {
        b.iter(|| shrink_against(mu.as_ref(), black_box(&w0)).unwrap())
    });
    let mut g = c.benchmark_group("meagre_chain");
    g.sample_size(10);
    for t in [2usize, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| meagre_chain(mu.as_ref(), &w0, t).unwrap())
        });
    }
    g.finish();
}

criterion_group!(kernels, bench_error_positions, bench_merge_depth, bench_chain);
criterion_main!(kernels);
