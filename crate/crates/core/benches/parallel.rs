use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use polyw::search::{decide_polygonal, SearchBounds};
use polyw::stats::run_trials_with;
use polyw::whitehead::minimal_orbit_with;
use polyw::{parse_cyclic, Executor};

fn executors() -> [(&'static str, Executor); 2] {
    [("sequential", Executor::sequential()), ("parallel", Executor::default())]
}

fn orbit(c: &mut Criterion) {
    let w = parse_cyclic("a^2 b^3 c a^-1 b^2 c^-2", 3).unwrap();
    let mut g = c.benchmark_group("minimal_orbit");
    for (name, exec) in executors() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, exec| {
            b.iter(|| minimal_orbit_with(black_box(&w), 1_000_000, exec).unwrap())
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let w = parse_cyclic("a b a b^2 a b^3", 2).unwrap();
    let mut g = c.benchmark_group("exhaustive_search");
    g.sample_size(10);
    for (name, jobs) in [("sequential", 1), ("parallel", 0)] {
        let bounds = SearchBounds::new(2, 28).with_jobs(jobs);
        g.bench_with_input(BenchmarkId::from_parameter(name), &bounds, |b, bounds| {
            b.iter(|| decide_polygonal(black_box(&w), bounds))
        });
    }
    g.finish();
}

fn stats(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_trials");
    for (name, exec) in executors() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, exec| {
            b.iter(|| run_trials_with(400, 20_000, black_box(7), exec))
        });
    }
    g.finish();
}

criterion_group!(benches, orbit, search, stats);
criterion_main!(benches);
