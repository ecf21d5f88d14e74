use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use photon_trajectories::engine::{run_trajectories, Execution, NoiseModel, Normalization, RunConfig};
use photon_trajectories::gbqc::{transpile, QubitCircuit};
use photon_trajectories::mbqc::run_mbqc_x;

fn execution_modes(c: &mut Criterion) {
    let bell = transpile(&QubitCircuit::bell()).unwrap();
    let noise = NoiseModel::combined(0.01);
    let mut g = c.benchmark_group("bell_2048_trajectories");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let cfg = RunConfig::new(2048, 1).normalized(Normalization::Herald).with_execution(exec);
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| run_trajectories(&bell, &noise, cfg).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("mbqc_x_512_trajectories");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let cfg = RunConfig::new(512, 1).normalized(Normalization::Herald).with_execution(exec);
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| run_mbqc_x(&noise, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, execution_modes);
criterion_main!(benches);
