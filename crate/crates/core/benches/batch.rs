use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ppl_core::batch::{adams_suite, collapse_suite, conservativeness_suite, sample_instances};
use ppl_core::dist::AdamsPool;
use ppl_core::exec::Execution;
use ppl_core::pool::sample_pool;
use ppl_core::pq::ThresholdPair;
use ppl_core::rational::rat;
use ppl_core::rcof::BackendConfig;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn adams(c: &mut Criterion) {
    let pool = AdamsPool::new(sample_pool(&[1, 2, 3], 3, 150, 1)).unwrap();
    let mut group = c.benchmark_group("adams");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, exec| {
            b.iter(|| adams_suite(&pool, &[1, 2, 3], 50, 7, *exec).unwrap())
        });
    }
    group.finish();
}

fn entailment(c: &mut Criterion) {
    let pool = sample_pool(&[1, 2], 3, 200, 1);
    let instances = sample_instances(&pool, 2, 300, 3).unwrap();
    let thresholds = [ThresholdPair::new(rat(3, 4), rat(1, 2)).unwrap()];
    let config = BackendConfig::default();
    let mut group = c.benchmark_group("entailment");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("collapse", name), &exec, |b, exec| {
            b.iter(|| collapse_suite(&instances, &thresholds, *exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("conservativeness", name), &exec, |b, exec| {
            b.iter(|| conservativeness_suite(&instances, &config, *exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, adams, entailment);
criterion_main!(benches);
