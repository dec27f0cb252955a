use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sawtm::tm::sweep;
use sawtm::{build_hash, generate_primes, ProblemSpec};

fn hash_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("hash_build");
    for size in [9, 13, 17] {
        group.bench_with_input(BenchmarkId::from_parameter(size), &size, |b, &l| {
            b.iter(|| build_hash(black_box(l), (l + 1) / 2, 1).unwrap())
        });
    }
    group.finish();
}

fn sweep_one_prime(c: &mut Criterion) {
    let prime = generate_primes(1)[0];
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (id, size) in [("hex-rhombus-saw", 8), ("hex-triangle-sap", 10), ("sq-saw-crossing", 7)] {
        let problem: ProblemSpec = id.parse().unwrap();
        group.bench_with_input(BenchmarkId::new(id, size), &size, |b, &l| {
            b.iter(|| sweep(&problem, black_box(l), prime, 1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hash_build, sweep_one_prime);
criterion_main!(benches);
