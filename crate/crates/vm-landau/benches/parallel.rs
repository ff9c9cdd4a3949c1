//! Criterion benches comparing the rayon-backed inner loops against the
//! sequential fallbacks: the reversed-dot kernel of the Volterra steppers and
//! a dispersion-curve k-sweep.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vm_landau::dispersion::Dispersion;
use vm_landau::equilibrium::{build_equilibrium, EquilibriumSpec};
use vm_landau::kernels::KernelTable;
use vm_landau::numerics::par;

fn bench_dot_rev(c: &mut Criterion) {
    let mut group = c.benchmark_group("volterra_dot");
    for n in [1 << 14, 1 << 17, 1 << 20] {
        let a: Vec<f64> = (0..n).map(|i| (i as f64 * 1e-3).sin()).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 2e-3).cos()).collect();
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |bch, _| {
            bch.iter(|| par::dot_rev_seq(&a, &b))
        });
        group.bench_with_input(BenchmarkId::new("auto", n), &n, |bch, _| {
            bch.iter(|| par::dot_rev(&a, &b))
        });
    }
    group.finish();
}

fn bench_k_sweep(c: &mut Criterion) {
    let eq = build_equilibrium(&EquilibriumSpec::maxwellian(1.0)).unwrap();
    let table = KernelTable::build(&eq).unwrap();
    let disp = Dispersion::new(&table);
    let kmax = 1.5 * table.kappa0();
    let mut group = c.benchmark_group("mode_curves");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| disp.mode_curves_seq(kmax, 128, None).unwrap())
    });
    group.bench_function("auto", |b| {
        b.iter(|| disp.mode_curves(kmax, 128, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_dot_rev, bench_k_sweep);
criterion_main!(benches);
