use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dqdsim_core::hamiltonian::{exchange_j, AssemblyMode, HamiltonianOptions};
use dqdsim_core::noise::{calibrate_barrier, calibrate_tilt, improvement_factor};
use dqdsim_core::{DeviceParams, Impurity};

fn pipeline(c: &mut Criterion) {
    let p = DeviceParams::default().with_epsilon(0.3);
    let imp = Impurity::at_half_separations(&p, -6.0, 6.0);
    let paper = HamiltonianOptions::default();
    let full = paper.with_mode(AssemblyMode::FullSlaterCondon);

    c.bench_function("exchange_j clean", |b| {
        b.iter(|| exchange_j(black_box(&p), None, &paper).unwrap())
    });
    c.bench_function("exchange_j impurity", |b| {
        b.iter(|| exchange_j(black_box(&p), Some(&imp), &paper).unwrap())
    });
    c.bench_function("exchange_j impurity full", |b| {
        b.iter(|| exchange_j(black_box(&p), Some(&imp), &full).unwrap())
    });

    let base = DeviceParams::default();
    c.bench_function("calibrate_tilt 242 MHz", |b| {
        b.iter(|| calibrate_tilt(&base, black_box(0.242), 1.3, &paper).unwrap())
    });
    c.bench_function("calibrate_barrier 242 MHz", |b| {
        b.iter(|| calibrate_barrier(&base, black_box(0.242), &paper).unwrap())
    });
    c.bench_function("improvement_factor 242 MHz", |b| {
        b.iter(|| improvement_factor(&base, black_box(0.242), &imp, 1.3, &paper).unwrap())
    });
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
