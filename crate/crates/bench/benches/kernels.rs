use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zaremba_bench::{disc_config, fem_system, halfline_setup};
use zaremba_core::disc::{self, DiscModel};
use zaremba_core::femlab::{self, build_mesh, Geometry};
use zaremba_core::halfline::{self, SymbolKind, SymbolSpec};
use zaremba_core::linalg::fourier;
use zaremba_core::specfun;

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    g.bench_function("bessel_i_scaled m=50 x=1", |b| {
        b.iter(|| specfun::bessel_i_scaled(black_box(50), black_box(1.0)))
    });
    g.bench_function("dtn_modal M=1024", |b| b.iter(|| disc::dtn_modal(black_box(1.0), 1024)));
    g.bench_function("poisson_gram_modal M=1024", |b| b.iter(|| disc::poisson_gram_modal(black_box(1.0), 1024)));
    g.bench_function("bessel_j_zeros m=5 k=100", |b| b.iter(|| specfun::bessel_j_zeros(black_box(5), 100)));
    g.finish();
}

fn circulants(c: &mut Criterion) {
    let mut g = c.benchmark_group("fourier");
    for n in [256usize, 1024] {
        let (grid, _) = halfline_setup(n);
        let sym = halfline::symbol_samples(&SymbolSpec::new(SymbolKind::LambdaPlus, 1.0).unwrap(), &grid);
        g.bench_with_input(BenchmarkId::new("multiplier_matrix", n), &sym, |b, s| {
            b.iter(|| fourier::multiplier_matrix(black_box(s)))
        });
    }
    g.finish();
}

fn disc_routes(c: &mut Criterion) {
    let mut g = c.benchmark_group("disc");
    g.sample_size(10);
    for n in [256usize, 512] {
        let model = DiscModel::new(disc_config(n)).unwrap();
        g.bench_with_input(BenchmarkId::new("route_a", n), &model, |b, m| b.iter(|| m.route_a()));
        g.bench_with_input(BenchmarkId::new("route_b", n), &model, |b, m| b.iter(|| m.route_b()));
    }
    g.finish();
}

fn halfline_checks(c: &mut Criterion) {
    let mut g = c.benchmark_group("halfline");
    g.sample_size(10);
    let (grid, mask) = halfline_setup(512);
    g.bench_function("theorem57_check N=512", |b| b.iter(|| halfline::theorem57_check(1.0, &grid, &mask)));
    g.bench_function("hankel_operator N=512", |b| b.iter(|| halfline::hankel_operator(1.0, &grid, &mask)));
    g.finish();
}

fn finite_elements(c: &mut Criterion) {
    let mut g = c.benchmark_group("femlab");
    g.sample_size(10);
    let sys = fem_system(32, 64);
    g.bench_function("band cholesky 32x64", |b| b.iter(|| sys.stiffness_free().cholesky()));
    g.bench_function("realization_spectrum 32x64 count=8", |b| b.iter(|| femlab::realization_spectrum(&sys, 8)));
    let mesh = build_mesh(Geometry::Disc, 12, 24).unwrap();
    g.bench_function("resolvent_difference 12x24", |b| {
        b.iter(|| femlab::resolvent_difference_spectrum(&mesh, 1.0, std::f64::consts::PI, 0.0, 20))
    });
    g.finish();
}

criterion_group!(benches, special_functions, circulants, disc_routes, halfline_checks, finite_elements);
criterion_main!(benches);
