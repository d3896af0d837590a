use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use biphoton::entanglement::{purity_quadrature_k, schmidt_decomposition, QuadratureConfig};
use biphoton::jsa::{build_grid, sample_jsa, Biphoton, GridPolicy, ImplicitJsa};
use biphoton::spectra::single_spectrum;
use biphoton::{PhaseMatchConstants, PumpSpec};

fn reference(length_m: f64) -> (PhaseMatchConstants, PumpSpec, Biphoton) {
    let pump = PumpSpec::new(397.5, 186.0).unwrap();
    let c = PhaseMatchConstants::anchored(0.1748, 0.0695, length_m, pump.tau_s()).unwrap();
    let bp = Biphoton::new(&c, &pump, length_m).unwrap();
    (c, pump, bp)
}

fn amplitude(c: &mut Criterion) {
    let (_, _, bp) = reference(0.005);
    let grid = build_grid(&bp, &GridPolicy::schmidt()).unwrap();
    c.bench_function("sample_jsa 5 mm schmidt grid", |b| b.iter(|| sample_jsa(black_box(&bp), &grid).unwrap()));
    let big = build_grid(&bp, &GridPolicy::spectral()).unwrap();
    let src = ImplicitJsa::new(bp, big).unwrap();
    c.bench_function("single_spectrum 5 mm spectral grid", |b| b.iter(|| single_spectrum(black_box(&src)).unwrap()));
}

fn schmidt(c: &mut Criterion) {
    let (_, _, bp) = reference(0.005);
    let jsa = sample_jsa(&bp, &build_grid(&bp, &GridPolicy::schmidt()).unwrap()).unwrap();
    let mut g = c.benchmark_group("schmidt");
    g.sample_size(10);
    g.bench_function("decomposition 5 mm", |b| b.iter(|| schmidt_decomposition(black_box(&jsa)).unwrap()));
    let (k, pump, _) = reference(0.01);
    let cfg = QuadratureConfig { check_convergence: false, ..Default::default() };
    g.bench_function("purity quadrature 10 mm", |b| {
        b.iter(|| purity_quadrature_k(black_box(&k), &pump, 0.01, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, amplitude, schmidt);
criterion_main!(benches);
