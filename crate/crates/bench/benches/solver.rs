use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use swipt_bench::secure_instance;
use swipt_core::conic::battery::planted_instance;
use swipt_core::conic::{solve, SolverConfig};
use swipt_core::secure::build_secure_sdp;

fn planted(c: &mut Criterion) {
    let mut group = c.benchmark_group("planted");
    for seed in [1u64, 7, 42] {
        let (problem, _) = planted_instance(seed);
        group.bench_with_input(BenchmarkId::from_parameter(seed), &problem, |b, p| {
            b.iter(|| solve(p, &SolverConfig::default()).expect("well-formed"))
        });
    }
    group.finish();
}

fn secure_program(c: &mut Criterion) {
    let mut group = c.benchmark_group("secure_program");
    for n_tx in [5usize, 8] {
        let (ch, params) = secure_instance(n_tx, 10.0, 0).expect("instance");
        let sdp = build_secure_sdp(&ch, &params).expect("program");
        group.bench_with_input(BenchmarkId::from_parameter(n_tx), &sdp.problem, |b, p| {
            b.iter(|| solve(p, &SolverConfig::default()).expect("well-formed"))
        });
    }
    group.finish();
}

criterion_group!(benches, planted, secure_program);
criterion_main!(benches);
