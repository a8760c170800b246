use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dta_bench::catalog_array;
use dta_core::construct::kronecker;
use dta_core::{coverage_index, is_detecting, is_detecting_brute, is_super_simple};

fn structural(c: &mut Criterion) {
    let table1 = catalog_array("table1");
    let example34 = catalog_array("example34");
    let kron = kronecker(&table1, &table1).unwrap();
    let mut g = c.benchmark_group("is_detecting");
    g.bench_function("table1 (1,2)", |b| {
        b.iter(|| is_detecting(black_box(&table1), 1, 2))
    });
    g.bench_function("example34 (2,2)", |b| {
        b.iter(|| is_detecting(black_box(&example34), 2, 2))
    });
    g.bench_function("table1 x table1 (3,2)", |b| {
        b.iter(|| is_detecting(black_box(&kron), 3, 2))
    });
    g.finish();

    c.bench_function("kronecker table1 x table1", |b| {
        b.iter(|| kronecker(black_box(&table1), black_box(&table1)))
    });
    c.bench_function("coverage_index example34", |b| {
        b.iter(|| coverage_index(black_box(&example34), 2))
    });
    c.bench_function("is_super_simple example34", |b| {
        b.iter(|| is_super_simple(black_box(&example34), 2))
    });
}

fn brute_force(c: &mut Criterion) {
    let table1 = catalog_array("table1");
    let example34 = catalog_array("example34");
    let mut g = c.benchmark_group("is_detecting_brute");
    g.sample_size(10);
    g.bench_function("table1 (1,2)", |b| {
        b.iter(|| is_detecting_brute(black_box(&table1), 1, 2))
    });
    g.bench_function("example34 (2,2)", |b| {
        b.iter(|| is_detecting_brute(black_box(&example34), 2, 2))
    });
    g.finish();
}

criterion_group!(benches, structural, brute_force);
criterion_main!(benches);
