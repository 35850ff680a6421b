use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rbcsp::harness::{linspace, sweep, Axis, SweepSpec};
use rbcsp::validate::oracle_equivalence;
use rbcsp::{CspParams, Exec, Heuristic, ModelKind};

fn modes() -> Vec<(&'static str, Exec)> {
    let mut modes = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        modes.push(("parallel", Exec::Parallel));
    }
    modes
}

fn threshold_sweep(c: &mut Criterion) {
    let base = CspParams::new(ModelKind::Rb, 2, 16, 0.8, 1.5, 0.4).unwrap();
    let p_cr = 1.0 - (-0.8f64 / 1.5).exp();
    let spec = SweepSpec {
        base,
        axis: Axis::P,
        values: linspace(0.5 * p_cr, 1.5 * p_cr, 5),
        samples_per_point: 40,
        base_seed: 1,
        node_limit: 1_000_000,
        forced: false,
        heuristic: Heuristic::Mrv,
    };
    let mut group = c.benchmark_group("sweep_n16");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep(&spec, exec).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_100");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| oracle_equivalence(100, 7, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, threshold_sweep, oracle);
criterion_main!(benches);
