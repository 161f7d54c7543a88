use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use overgroup_core::exec::Exec;
use overgroup_core::rep::Rep;
use overgroup_core::roots::CaseTag;
use overgroup_core::suites::{self, Counts, SuiteOptions};

fn options(exec: Exec) -> SuiteOptions {
    let mut counts = Counts::quick();
    counts.root_type = 200;
    SuiteOptions { seed: 11, exec, counts }
}

fn sequential_vs_parallel(c: &mut Criterion) {
    let e6 = Rep::new(CaseTag::B, 0).unwrap();
    let e7 = Rep::new(CaseTag::C, 0).unwrap();
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let opts = options(exec);
        let label = format!("{exec:?}");
        group.bench_with_input(BenchmarkId::new("steinberg_e6", &label), &opts, |b, o| {
            b.iter(|| suites::steinberg_suite(&e6, o))
        });
        group.bench_with_input(BenchmarkId::new("root_type_e7", &label), &opts, |b, o| {
            b.iter(|| suites::root_type_suite(&e7, o))
        });
    }
    group.finish();
}

criterion_group!(benches, sequential_vs_parallel);
criterion_main!(benches);
