use std::f64::consts::PI;

use billiard_wigner::current::current_fields;
use billiard_wigner::exec::Execution;
use billiard_wigner::spectral::{Mode, StateExpansion};
use billiard_wigner::wigner::{wigner_field, PhaseSpaceGrid};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn setup() -> (StateExpansion, PhaseSpaceGrid) {
    let modes = [1, 5, 10].iter().map(|&n| Mode::single(n).unwrap()).collect();
    let s = StateExpansion::project_gaussian(1.0, &[5.0], modes, 1.0).unwrap();
    let g = PhaseSpaceGrid::linspace((-1.0, 1.0), 101, (-4.0 * PI, 4.0 * PI), 101).unwrap();
    (s, g)
}

fn fields(c: &mut Criterion) {
    let (s, g) = setup();
    let mut group = c.benchmark_group("wigner_field");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| wigner_field(&s, &g, 0.25, e).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("current_fields");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &e| {
            b.iter(|| current_fields(&s, &g, 0.25, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fields);
criterion_main!(benches);
