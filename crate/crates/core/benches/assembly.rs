use std::hint::black_box;

use calderon::exec::Execution;
use calderon::geometry::{Curve, GridGeometry};
use calderon::harness::{run_study, Settings, StudyConfig};
use calderon::operators::{assemble_all_with, AssemblyOptions};
use calderon::potentials::{Clearance, Density, Lattice, LayerField};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble_all");
    g.sample_size(10);
    for n in [80, 160] {
        let grid = GridGeometry::new(&Curve::paper_ellipse(), n, 1.0 / 6.0).unwrap();
        for (name, exec) in MODES {
            let opts = AssemblyOptions { exec, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(name, n), &grid, |b, grid| {
                b.iter(|| assemble_all_with(black_box(grid), 3.0, opts).unwrap())
            });
        }
    }
    g.finish();
}

fn lattice(c: &mut Criterion) {
    let n = 160;
    let grid = GridGeometry::new(&Curve::paper_ellipse(), n, 1.0 / 6.0).unwrap();
    let eta = Density::charge((0..n).map(|i| Complex64::new((i as f64).cos(), 0.5)).collect());
    let field = LayerField::single(&grid, 3.0, eta, Complex64::new(1.0, 0.0)).unwrap();
    let points = Lattice::new(-4.0, 4.0, -3.0, 3.0, 60, 45).unwrap().points();
    let mut g = c.benchmark_group("lattice_eval");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| field.eval_many(black_box(&points), Clearance::default(), exec)));
    }
    g.finish();
}

fn ladder(c: &mut Criterion) {
    let mut s = Settings::new();
    s.set("N", "10,20,40,80").unwrap();
    let base = StudyConfig::from_settings(&s).unwrap();
    let mut g = c.benchmark_group("ladder_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mut cfg = base.clone();
        cfg.exec = exec;
        g.bench_function(name, |b| b.iter(|| run_study(black_box(&cfg)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, assembly, lattice, ladder);
criterion_main!(benches);
