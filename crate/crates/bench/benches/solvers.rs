use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eot_bench::{exact_ot_small, image_pair, image_pair_to_problem};
use eot_core::{
    approximate_ot, approximate_ot_sinkhorn, approximate_ot_stochastic, pdasmd_batch_solve, EntropicProblem,
    SolverConfig,
};
use std::hint::black_box;

fn pdasmd_epochs(c: &mut Criterion) {
    let mut group = c.benchmark_group("pdasmd_ten_epochs");
    for side in [6, 8, 10] {
        let (a, b) = image_pair(side, 1);
        let (p, q, cost) = image_pair_to_problem(&a, &b).unwrap();
        let prob = EntropicProblem::new(cost, p, q, 0.5).unwrap();
        for batch in [1, 8] {
            let cfg = SolverConfig { batch, max_epochs: Some(10), ..SolverConfig::default() };
            group.bench_with_input(BenchmarkId::new(format!("B{batch}"), side * side), &prob, |bench, prob| {
                bench.iter(|| pdasmd_batch_solve(black_box(prob), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn pipelines(c: &mut Criterion) {
    let (a, b) = image_pair(6, 2);
    let (p, q, cost) = image_pair_to_problem(&a, &b).unwrap();
    let eps = 0.5 * cost.max_abs();
    let mut group = c.benchmark_group("pipeline_n36");
    group.sample_size(20);
    group.bench_function("pdasmd_linf", |bench| {
        bench.iter(|| approximate_ot(&cost, &p, &q, eps, &SolverConfig::default()).unwrap())
    });
    group.bench_function("sinkhorn", |bench| {
        bench.iter(|| approximate_ot_sinkhorn(&cost, &p, &q, eps, 1_000_000).unwrap())
    });
    group.bench_function("stochastic_sinkhorn", |bench| {
        bench.iter(|| approximate_ot_stochastic(&cost, &p, &q, eps, 1).unwrap())
    });
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let (a, b) = image_pair(5, 3);
    let (p, q, cost) = image_pair_to_problem(&a, &b).unwrap();
    c.bench_function("exact_ot_n25", |bench| bench.iter(|| exact_ot_small(&cost, &p, &q).unwrap()));
}

criterion_group!(benches, pdasmd_epochs, pipelines, oracle);
criterion_main!(benches);
