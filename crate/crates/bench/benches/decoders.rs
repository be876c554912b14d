use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dispersa_bench::{flip_fixture, list_fixture, unique_fixture};
use dispersa_core::extremal::{certify_disperser_exhaustive, DEFAULT_SUBSET_CAP};
use dispersa_core::graphcode::{list_decode, unique_decode};
use dispersa_core::mothercode::MotherCode;
use dispersa_core::plurality::{scan_plurality, ScanMode};
use dispersa_core::DisperserSpec;
use std::hint::black_box;

fn unique(c: &mut Criterion) {
    let f = unique_fixture();
    c.bench_function("unique_decode/desk", |b| {
        b.iter(|| {
            let out = unique_decode(&f.code, black_box(&f.received), f.k).unwrap();
            assert_eq!(out.as_ref(), Some(&f.sent));
        })
    });
    let mut group = c.benchmark_group("unique_decode/flip");
    group.sample_size(20);
    for n in [2048, 4096, 8192] {
        let (code, k, y) = flip_fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| unique_decode(&code, black_box(&y), k).unwrap())
        });
    }
    group.finish();
}

fn list(c: &mut Criterion) {
    let f = list_fixture(5);
    c.bench_function("list_decode/desk", |b| {
        b.iter(|| {
            let out = list_decode(&f.code, black_box(&f.received), f.k, 2, 0.5).unwrap();
            assert!(out.contains(&f.sent));
        })
    });
}

fn certify(c: &mut Criterion) {
    let f = unique_fixture();
    let spec = DisperserSpec::plain(f.k, 0.25);
    c.bench_function("certify_disperser_exhaustive/desk", |b| {
        b.iter(|| certify_disperser_exhaustive(f.code.graph(), black_box(&spec), DEFAULT_SUBSET_CAP).unwrap())
    });
}

fn plurality(c: &mut Criterion) {
    let f = unique_fixture();
    let image: Vec<_> = f.code.mother().codewords().unwrap().iter().map(|w| f.code.encode(w).unwrap()).collect();
    c.bench_function("scan_plurality/exhaustive_l3", |b| {
        b.iter(|| scan_plurality(black_box(&image), 3, ScanMode::Exhaustive { cap: 1 << 20 }).unwrap())
    });
}

criterion_group!(benches, unique, list, certify, plurality);
criterion_main!(benches);
