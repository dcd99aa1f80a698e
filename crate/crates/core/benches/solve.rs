use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mms_core::solver::{fallback_search_with, solve_batch};
use mms_core::verify::verify_batch;
use mms_core::{generate, Exec, GenSpec, Instance, Profile, SearchBudget, SolveOptions};

fn corpus(count: usize, profile: Profile) -> Vec<Instance> {
    (0..count)
        .map(|s| {
            let n = 4 + s % 2;
            let spec = GenSpec { num_agents: n, num_items: n + 5, profile, value_range: (-9, 9), seed: s as u64 };
            generate(&spec).unwrap()
        })
        .collect()
}

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn batch_solve(c: &mut Criterion) {
    let insts = corpus(64, Profile::WithNonnegativeAgent);
    let mut group = c.benchmark_group("solve_batch");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| solve_batch(&insts, SolveOptions::default(), exec))
        });
    }
    group.finish();
}

fn batch_verify(c: &mut Criterion) {
    let insts = corpus(64, Profile::Chores);
    let cases: Vec<_> = insts
        .iter()
        .zip(solve_batch(&insts, SolveOptions::default(), Exec::Parallel))
        .map(|(inst, out)| (inst.clone(), out.unwrap().allocation.unwrap()))
        .collect();
    let mut group = c.benchmark_group("verify_batch");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_batch(&cases, SearchBudget::default(), exec))
        });
    }
    group.finish();
}

fn fallback(c: &mut Criterion) {
    // Negative mixed agents only: the constructive paths do not apply.
    let inst = generate(&GenSpec {
        num_agents: 5,
        num_items: 10,
        profile: Profile::NegativeMixedOnly,
        value_range: (-9, 9),
        seed: 3,
    })
    .unwrap();
    let mut group = c.benchmark_group("fallback_search");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| fallback_search_with(&inst, SearchBudget::default(), exec))
        });
    }
    group.finish();
}

criterion_group!(benches, batch_solve, batch_verify, fallback);
criterion_main!(benches);
