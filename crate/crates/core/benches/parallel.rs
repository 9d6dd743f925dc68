use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orderfind::circuits::{experimental_oracle_sequences, search_oracle_sequence};
use orderfind::classical::single_query_certificate;
use orderfind::measurement::sweep;
use orderfind::prodops::schedule_prep;
use orderfind::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_96_cases");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep(exec));
        });
    }
    group.finish();
}

fn bench_sequence_search(c: &mut Criterion) {
    let [.., (_, seq)] = experimental_oracle_sequences();
    let mut group = c.benchmark_group("oracle_sequence_search");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| search_oracle_sequence(&seq, exec));
        });
    }
    group.finish();
}

fn bench_schedule(c: &mut Criterion) {
    let mut group = c.benchmark_group("schedule_five_spins");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| schedule_prep(5, 9, exec).expect("schedule exists"));
        });
    }
    group.finish();
}

fn bench_single_query(c: &mut Criterion) {
    let mut group = c.benchmark_group("single_query_certificate");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| single_query_certificate(exec));
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_sweep,
    bench_sequence_search,
    bench_schedule,
    bench_single_query
);
criterion_main!(benches);
