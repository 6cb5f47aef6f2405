//! Rayon core against a one-thread pool. Build with `--no-default-features` to time the
//! sequential fallback itself.

use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mindisk_core::families::{rescaled_helicoids, Sampling};
use mindisk_core::mesh::SurfaceMesh;
use mindisk_core::solver::{solve, AnnularDomain, BoundaryData, SolverConfig};
use mindisk_core::surface::{fundamental_forms, make_helicoid, DerivMode};

fn workloads(c: &mut Criterion, label: &str, run: &dyn Fn(&mut (dyn FnMut() + Send))) {
    let mut g = c.benchmark_group("core");
    g.sample_size(10);
    let patch = make_helicoid((-2.0, 2.0), (-PI, PI), 512, 512, DerivMode::CentralDifference).unwrap();
    g.bench_function(BenchmarkId::new("fundamental_forms_512", label), |b| {
        b.iter(|| run(&mut || drop(black_box(fundamental_forms(&patch).unwrap()))))
    });
    let mesh = SurfaceMesh::from_patch(&patch, false).unwrap();
    let (verts, tris) = (mesh.vertices().to_vec(), mesh.triangles().to_vec());
    g.bench_function(BenchmarkId::new("quadric_fit_512", label), |b| {
        b.iter(|| run(&mut || drop(black_box(SurfaceMesh::from_geometry(verts.clone(), tris.clone()).unwrap()))))
    });
    let dom = AnnularDomain::square(1.0, 8.0, 4, 64).unwrap();
    let data = BoundaryData::from_fn(&dom, |r, t| t + 0.3 * (r.ln() + t).sin()).unwrap();
    g.bench_function(BenchmarkId::new("solve_4_sheets_64", label), |b| {
        b.iter(|| run(&mut || drop(black_box(solve(&dom, &data, &SolverConfig::default()).unwrap()))))
    });
    g.bench_function(BenchmarkId::new("rescaled_helicoids_4", label), |b| {
        b.iter(|| run(&mut || drop(black_box(rescaled_helicoids(4, Sampling::default()).unwrap()))))
    });
    g.finish();
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    workloads(c, "1-thread", &|f| single.install(f));
    let label = format!("default-pool-{}", rayon::current_num_threads());
    workloads(c, &label, &|f| f());
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    workloads(c, "sequential", &|f| f());
}

criterion_group!(benches, bench);
criterion_main!(benches);
