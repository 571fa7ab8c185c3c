use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use folm::interferometer::{run_batch, Configuration, Scenario};
use folm::{Execution, C64};
use std::hint::black_box;

fn perpendicular_sweep(n: usize, oracle: bool) -> Vec<Scenario> {
    let period = folm::params::FieldParams::default().period();
    (0..n)
        .map(|k| {
            let mut s = Scenario::new(Configuration::Perpendicular);
            s.alpha = C64::new(0.5, 0.2);
            s.alpha_i_magnitude = Some(1.0);
            s.params.timing.t2 = period * k as f64 / n as f64;
            s.oracle = oracle;
            s
        })
        .collect()
}

fn parallel_sweep(n: usize) -> Vec<Scenario> {
    (0..n)
        .map(|k| {
            let mut s = Scenario::new(Configuration::Parallel);
            s.geometry.second.theta_m = 0.05 * k as f64 / n as f64;
            s
        })
        .collect()
}

fn compare(c: &mut Criterion, name: &str, scenarios: &[Scenario]) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    for (label, exec) in [("serial", Execution::Serial), ("parallel", Execution::Parallel)] {
        group.bench_with_input(BenchmarkId::new(label, scenarios.len()), scenarios, |b, s| {
            b.iter(|| black_box(run_batch(black_box(s), exec)))
        });
    }
    group.finish();
}

fn benches(c: &mut Criterion) {
    compare(c, "fock_oracle", &perpendicular_sweep(64, true));
    compare(c, "closed_form", &perpendicular_sweep(20_000, false));
    compare(c, "sphere_jones", &parallel_sweep(20_000));
}

criterion_group!(batch, benches);
criterion_main!(batch);
