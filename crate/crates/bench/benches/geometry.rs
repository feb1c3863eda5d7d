use criterion::{criterion_group, criterion_main, Criterion};
use siclab::clifford::{metaplectic_unitary, zauner_matrix};
use siclab::sic::{appendix19_certificate, frame_potential_and_gradient, overlap_table, search_fiducial};
use siclab::weyl::check_heisenberg;
use siclab::{SearchOptions, ZaunerKind};
use std::hint::black_box;

fn weyl(c: &mut Criterion) {
    c.bench_function("check_heisenberg d=6", |b| b.iter(|| check_heisenberg(black_box(6)).unwrap()));
    let f = zauner_matrix(19, ZaunerKind::Fz).unwrap();
    c.bench_function("metaplectic_unitary Fz d=19", |b| b.iter(|| metaplectic_unitary(black_box(&f), 19).unwrap()));
}

fn sic(c: &mut Criterion) {
    let fid = search_fiducial(5, &SearchOptions { restarts: 8, ..Default::default() }).unwrap();
    c.bench_function("frame_potential_and_gradient d=5", |b| b.iter(|| frame_potential_and_gradient(black_box(&fid.v))));
    c.bench_function("overlap_table d=5", |b| b.iter(|| overlap_table(black_box(&fid.v))));
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("search_fiducial d=4", |b| {
        b.iter(|| search_fiducial(4, &SearchOptions { restarts: 8, ..Default::default() }).unwrap())
    });
    group.finish();
    c.bench_function("appendix19_certificate", |b| b.iter(appendix19_certificate));
}

criterion_group!(benches, weyl, sic);
criterion_main!(benches);
