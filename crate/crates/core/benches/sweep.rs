use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qmut_core::sweep::{classify_all, orbit_summaries, witness_all, Execution};
use qmut_core::ExchangeTriple;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample(n: usize, hi: f64, seed: u64) -> Vec<ExchangeTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut w = [0.0; 3];
            for x in &mut w {
                *x = rng.random_range(-hi..hi);
            }
            ExchangeTriple::from_weights(w).unwrap()
        })
        .collect()
}

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_all");
    for n in [1_000, 100_000] {
        let qs = sample(n, 3.0, 1);
        group.throughput(Throughput::Elements(n as u64));
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &qs, |b, qs| {
                b.iter(|| classify_all(black_box(qs), mode))
            });
        }
    }
    group.finish();
}

fn bench_orbits(c: &mut Criterion) {
    let mut group = c.benchmark_group("orbit_summaries");
    group.sample_size(20);
    let qs: Vec<ExchangeTriple> = sample(4_000, 1.0, 2)
        .into_iter()
        .filter(|b| qmut_core::classify(b).bounded)
        .take(256)
        .collect();
    for len in [1_000, 10_000] {
        group.throughput(Throughput::Elements((qs.len() * len) as u64));
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, len), &len, |b, &len| {
                b.iter(|| orbit_summaries(black_box(&qs), len, 7, mode))
            });
        }
    }
    group.finish();
}

fn bench_witnesses(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness_all");
    group.sample_size(20);
    let qs: Vec<ExchangeTriple> = sample(4_000, 4.0, 3)
        .into_iter()
        .filter(|b| !qmut_core::classify(b).bounded)
        .take(512)
        .collect();
    group.throughput(Throughput::Elements(qs.len() as u64));
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| witness_all(black_box(&qs), 1e6, mode)));
    }
    group.finish();
}

criterion_group!(benches, bench_classify, bench_orbits, bench_witnesses);
criterion_main!(benches);
