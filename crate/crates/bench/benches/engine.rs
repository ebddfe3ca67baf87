use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use editwalk_bench::{moran_complete, simple_complete, simple_cycle};
use editwalk_core::lattice::SupportLattice;
use editwalk_core::process::{rng_for, run};
use editwalk_core::spectral::{build_chain, compound_spectrum, numeric_eigenvalues, stationary_closed_form, Restrict};

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    const STEPS: u64 = 100_000;
    group.throughput(Throughput::Elements(STEPS));
    for n in [10, 100] {
        let (host, dist) = simple_complete(n, 0.075);
        group.bench_with_input(BenchmarkId::new("simple_complete", n), &n, |b, _| {
            let mut rng = rng_for(1, 0);
            b.iter(|| run(&dist, &host.empty_set(), STEPS, &mut rng, |_, _| {}).unwrap())
        });
    }
    let (host, dist) = moran_complete(20);
    group.bench_function("moran_complete/20", |b| {
        let mut rng = rng_for(1, 0);
        b.iter(|| run(&dist, &host.full_set(), STEPS, &mut rng, |_, _| {}).unwrap())
    });
    group.finish();
}

fn chains(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_chain");
    for m in [8, 12, 16] {
        let (_, dist) = simple_cycle(m);
        group.bench_with_input(BenchmarkId::new("simple_cycle", m), &m, |b, _| {
            b.iter(|| build_chain(black_box(&dist), Restrict::All, 1 << 20).unwrap())
        });
    }
    let (_, dist) = moran_complete(5);
    group.bench_function("moran_recurrent/K5", |b| {
        b.iter(|| build_chain(black_box(&dist), Restrict::Recurrent, 1 << 20).unwrap())
    });
    group.finish();
}

fn lattices(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice");
    for n in [4, 5] {
        let (_, dist) = moran_complete(n);
        group.bench_with_input(BenchmarkId::new("closure_mobius/moran_K", n), &n, |b, _| {
            b.iter(|| {
                let lattice = SupportLattice::of_distribution(black_box(&dist)).unwrap();
                (0..lattice.len()).map(|x| lattice.mobius_row(x).len()).sum::<usize>()
            })
        });
        group.bench_with_input(BenchmarkId::new("compound_spectrum/moran_K", n), &n, |b, _| {
            b.iter(|| compound_spectrum(black_box(&dist), 1 << 20).unwrap())
        });
    }
    group.finish();
}

fn eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigensolve");
    group.sample_size(10);
    for m in [6, 8] {
        let (_, dist) = simple_cycle(m);
        let chain = build_chain(&dist, Restrict::All, 1 << 20).unwrap();
        let pi = stationary_closed_form(&vec![0.5; m]).unwrap();
        group.bench_with_input(BenchmarkId::new("symmetric/simple_cycle", m), &m, |b, _| {
            b.iter(|| numeric_eigenvalues(&chain, Some(&pi)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, steps, chains, lattices, eigensolve);
criterion_main!(benches);
