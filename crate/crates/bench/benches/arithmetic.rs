use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;
use siclab::quadfield::{class_number, fundamental_unit, phi_finite};
use siclab::rayclass::quotient_certificate;
use siclab::towers::{dims_for_radicand, radicand_for_dim, verify_congruences};
use siclab::QuadField;
use std::hint::black_box;

fn tower(c: &mut Criterion) {
    c.bench_function("dims_for_radicand D=5 r<=40", |b| b.iter(|| dims_for_radicand(black_box(5), 40).unwrap()));
    c.bench_function("radicand_for_dim 4..200", |b| {
        b.iter(|| (4u64..200).map(|d| radicand_for_dim(&BigUint::from(d)).unwrap()).sum::<u64>())
    });
    c.bench_function("verify_congruences D=13 n<=12 r<=6", |b| b.iter(|| verify_congruences(black_box(13), 12, 6).unwrap()));
}

fn field(c: &mut Criterion) {
    let k = QuadField::new(94).unwrap();
    c.bench_function("fundamental_unit D=94", |b| b.iter(|| fundamental_unit(black_box(k))));
    let k = QuadField::new(9973).unwrap();
    c.bench_function("class_number D=9973", |b| b.iter(|| class_number(black_box(k)).unwrap()));
    let k = QuadField::new(5).unwrap();
    c.bench_function("phi_finite D=5 n=720", |b| b.iter(|| phi_finite(k, black_box(720))));
    c.bench_function("quotient_certificate d=19", |b| b.iter(|| quotient_certificate(black_box(19)).unwrap()));
}

criterion_group!(benches, tower, field);
criterion_main!(benches);
