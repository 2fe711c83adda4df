// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use chiral_core::circuit::{compile_protocol, run_statevector, CompileOptions};
use chiral_core::hamiltonian::build_h_stap;
use chiral_core::linalg::expm_hermitian;
use chiral_core::propagator::evolve_schedule;
use chiral_core::pulse::{
    discretize, stap_corrected_pulses, Discretization, Handedness, Protocol, StapParams, StapSchedule, StirapParams,
    StirapSchedule,
};
use chiral_core::scenario::{sweep_trotter, ScenarioConfig};
use chiral_core::{Schedule, Statevector};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn stap() -> Schedule {
    Schedule::Stap(StapSchedule::new(&StapParams::default()).unwrap())
}

fn bench_expm(c: &mut Criterion) {
    let h = build_h_stap((1.3, -0.7), 0.0, 0.0).entries;
    c.bench_function("expm_hermitian/raman", |b| b.iter(|| expm_hermitian(black_box(&h), 0.01)));
}

fn bench_pulses(c: &mut Criterion) {
    let Schedule::Stap(s) = stap() else { unreachable!() };
    c.bench_function("stap_corrected_pulses", |b| {
        b.iter(|| stap_corrected_pulses(&s.path, black_box(1.9)).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    let stirap = Schedule::Stirap(StirapSchedule::new(&StirapParams::default()).unwrap());
    for (name, sched) in [("stirap", stirap), ("stap", stap())] {
        group.bench_with_input(BenchmarkId::new(name, 2000), &sched, |b, s| {
            b.iter(|| evolve_schedule(s, Handedness::L, 2000, &[]).unwrap())
        });
    }
    group.finish();
}

fn bench_circuit(c: &mut Criterion) {
    let mut group = c.benchmark_group("circuit");
    let sched = stap();
    for n in [20usize, 80, 320] {
        group.bench_with_input(BenchmarkId::new("compile_and_run", n), &n, |b, &n| {
            b.iter(|| {
                let d = discretize(&sched, n, Discretization::AreaPreserving).unwrap();
                let circ = compile_protocol(&d, Handedness::R, Protocol::Stap, &CompileOptions::default());
                run_statevector(&circ, &Statevector::ground())
            })
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let cfg = ScenarioConfig {
        protocol: Protocol::Stirap,
        ..Default::default()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("trotter_10_to_80", |b| b.iter(|| sweep_trotter(&cfg, &[10, 20, 40, 80]).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_expm, bench_pulses, bench_oracle, bench_circuit, bench_sweep);
criterion_main!(benches);
