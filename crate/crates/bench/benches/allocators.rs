use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use swipt_bench::{moop_instance, secure_instance};
use swipt_core::moop::{solve_iree_max, solve_weighted_minmax, MoopConfig, WeightVector};
use swipt_core::secure::{baseline_zf, solve_secure, SecureConfig, ZfScheme};

fn moop(c: &mut Criterion) {
    let (ch, params, anchors) = moop_instance(0).expect("instance");
    let cfg = MoopConfig::default();
    c.bench_function("iree_max", |b| b.iter(|| solve_iree_max(&ch, &params, &cfg).expect("solve")));
    let mut group = c.benchmark_group("weighted_minmax");
    for (name, w) in [("balanced", (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)), ("ir_eh", (0.5, 0.5, 0.0))] {
        let w = WeightVector::new(w.0, w.1, w.2).expect("weights");
        group.bench_with_input(BenchmarkId::from_parameter(name), &w, |b, w| {
            b.iter(|| solve_weighted_minmax(*w, &ch, &params, &anchors, &cfg).expect("solve"))
        });
    }
    group.finish();
}

fn secure(c: &mut Criterion) {
    let cfg = SecureConfig::default();
    let mut group = c.benchmark_group("secure");
    group.sample_size(20);
    for n_tx in [5usize, 8] {
        let (ch, params) = secure_instance(n_tx, 14.0, 0).expect("instance");
        group.bench_function(BenchmarkId::new("optimal", n_tx), |b| b.iter(|| solve_secure(&ch, &params, &cfg).expect("solve")));
        group.bench_function(BenchmarkId::new("baseline1", n_tx), |b| {
            b.iter(|| baseline_zf(&ch, &params, ZfScheme::AdaptiveSplit, &cfg).expect("solve"))
        });
    }
    group.finish();
}

criterion_group!(benches, moop, secure);
criterion_main!(benches);
