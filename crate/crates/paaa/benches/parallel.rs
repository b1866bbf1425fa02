//! Data-parallel hot loops against their sequential twins: Loewner
//! assembly and grid-wide error sweeps at the two-variable benchmark
//! scale. With the default `parallel` feature the first variant runs on
//! rayon; built with `--no-default-features` both run sequentially.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use paaa::fit::{error_report, error_report_serial, fit, FitOptions};
use paaa::grid::Partition;
use paaa::loewner::{assemble, assemble_serial};
use paaa::models;

fn penzl_fixture() -> (
    paaa::grid::TensorGrid,
    Partition,
    paaa::barycentric::BarycentricModel,
) {
    let grid = models::penzl_2var_grid(100, 30).expect("grid samples");
    let opts = FitOptions {
        tol: 1e-3,
        ..FitOptions::default()
    };
    let (model, _) = fit(&grid, &opts).expect("fit converges");
    let part = Partition::from_coords(grid.axes(), model.support_points()).expect("support");
    (grid, part, model)
}

fn bench_assemble(c: &mut Criterion) {
    let (grid, part, _) = penzl_fixture();
    let mut group = c.benchmark_group("loewner_assemble_100x30_k9q9");
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || (),
            |()| assemble(&grid, &part).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("serial", |b| {
        b.iter_batched(
            || (),
            |()| assemble_serial(&grid, &part).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn bench_error_sweep(c: &mut Criterion) {
    let (grid, _, model) = penzl_fixture();
    let mut group = c.benchmark_group("error_sweep_3000_points");
    group.bench_function("parallel", |b| {
        b.iter(|| error_report(&grid, &model).unwrap())
    });
    group.bench_function("serial", |b| {
        b.iter(|| error_report_serial(&grid, &model).unwrap())
    });
    group.finish();
}

fn bench_full_fit(c: &mut Criterion) {
    let grid = models::synthetic_2var_grid(21, 21).expect("grid samples");
    let opts = FitOptions {
        tol: 1e-3,
        ..FitOptions::default()
    };
    c.bench_function("fit_synthetic_21x21", |b| {
        b.iter(|| fit(&grid, &opts).unwrap())
    });
}

criterion_group!(benches, bench_assemble, bench_error_sweep, bench_full_fit);
criterion_main!(benches);
