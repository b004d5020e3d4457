use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use csflow_bench::workload_curve;
use csflow_core::entropy::{f_functional, GaussianSpec};
use csflow_core::flow::{step, FlowConfig, FlowState};
use csflow_core::geometry::frenet_frame;

fn bench_flow_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_step");
    for m in [128usize, 256, 512] {
        let state = FlowState::new(0.0, workload_curve(m)).unwrap();
        let config = FlowConfig::blowup(m, 1e12);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| step(&state, &config).unwrap())
        });
    }
    group.finish();
}

fn bench_resample(c: &mut Criterion) {
    let curve = workload_curve(256);
    c.bench_function("resample_256", |b| b.iter(|| curve.resample(256).unwrap()));
}

fn bench_frenet(c: &mut Criterion) {
    let curve = workload_curve(256);
    let table = curve.arclength().unwrap();
    c.bench_function("frenet_frame_256", |b| b.iter(|| frenet_frame(&curve, &table)));
}

fn bench_f_functional(c: &mut Criterion) {
    let curve = workload_curve(256);
    let table = curve.arclength().unwrap();
    let spec = GaussianSpec { x0: vec![0.0; 4], t0: 0.5 };
    c.bench_function("f_functional_256", |b| b.iter(|| f_functional(&curve, &table, &spec)));
}

criterion_group!(benches, bench_flow_step, bench_resample, bench_frenet, bench_f_functional);
criterion_main!(benches);
