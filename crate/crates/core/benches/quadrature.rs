//! Sequential against rayon-parallel evaluation of the main integrals.
//!
//! "sequential" runs inside a one-thread pool; "parallel" uses the default
//! pool. Building with `--no-default-features` removes rayon from the
//! library altogether, and both groups then measure the plain loop.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use casimir_lateral::lifshitz::{d2_energy_per_area, CavityConfig};
use casimir_lateral::medium::PlasmaMaterial;
use casimir_lateral::quad::QuadratureSpec;
use casimir_lateral::response::{response_g, ResponseQuery};

fn pools() -> [(&'static str, rayon::ThreadPool); 2] {
    [
        ("sequential", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench_lifshitz(c: &mut Criterion) {
    let cavity = CavityConfig::new(200.0, PlasmaMaterial::gold()).unwrap();
    let q = QuadratureSpec::default().with_rel_tol(1e-6);
    let mut group = c.benchmark_group("lifshitz_d2");
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| d2_energy_per_area(black_box(&cavity), &q).unwrap())));
    }
    group.finish();
}

fn bench_response(c: &mut Criterion) {
    let cavity = CavityConfig::new(200.0, PlasmaMaterial::gold()).unwrap();
    let q = QuadratureSpec::default().with_rel_tol(1e-4);
    let query = ResponseQuery::new(0.0052, cavity, q);
    let mut group = c.benchmark_group("response_g");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| response_g(black_box(&query)).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench_lifshitz, bench_response);
criterion_main!(benches);
