use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use schroedsym::algebra::{casimir_i2, casimir_i3, generators_linear, generators_quadratic};
use schroedsym::multiplier::{k_linear, k_quadratic};
use schroedsym::residual::verify_transformation;
use schroedsym::suite::family_fixture;
use schroedsym::{compose, inverse, re};
use schroedsym_bench::{elements, linear_spec, quadratic_spec, sample_point};

fn group(c: &mut Criterion) {
    let els = elements(64);
    c.bench_function("compose_64", |b| {
        b.iter(|| {
            els.iter()
                .fold(els[0], |acc, g| compose(black_box(&acc), g))
        })
    });
    c.bench_function("inverse", |b| b.iter(|| inverse(black_box(&els[3]))));
}

fn multipliers(c: &mut Criterion) {
    let g = elements(1)[0];
    let z = sample_point();
    let (lin, quad) = (linear_spec(), quadratic_spec());
    c.bench_function("multiplier_linear", |b| {
        b.iter(|| k_linear(black_box(&g), &z, &lin).unwrap())
    });
    c.bench_function("multiplier_quadratic", |b| {
        b.iter(|| k_quadratic(black_box(&g), &z, &quad).unwrap())
    });
}

fn residuals(c: &mut Criterion) {
    let g = elements(2)[1];
    for (name, spec) in [
        ("transform_residual_linear", linear_spec()),
        ("transform_residual_quadratic", quadratic_spec()),
    ] {
        let (f, grid) = family_fixture(&spec, 10, 20).unwrap();
        c.bench_function(name, |b| {
            b.iter(|| verify_transformation(&f, black_box(&g), &spec, &grid).unwrap())
        });
    }
}

fn operators(c: &mut Criterion) {
    let lin = generators_linear(re(1.0), 0.3, 0.7).unwrap();
    let quad = generators_quadratic(re(1.0), 0.3, re(0.8)).unwrap();
    c.bench_function("diffop_commutator", |b| {
        b.iter(|| lin.lplus.commutator(black_box(&lin.lminus)).unwrap())
    });
    c.bench_function("casimir_i2_quadratic", |b| {
        b.iter(|| casimir_i2(black_box(&quad)).unwrap())
    });
    c.bench_function("casimir_i3_linear", |b| {
        b.iter(|| casimir_i3(black_box(&lin)).unwrap())
    });
}

criterion_group!(benches, group, multipliers, residuals, operators);
criterion_main!(benches);
