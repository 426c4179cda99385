use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use strebel_core::oracle::{annulus_modulus, quad_modulus, GridDomain};
use strebel_core::qc::{assemble_f, quasisymmetry_sup, AnnulusSpec, InterpolationParams, QsSearch};
use strebel_core::Complex64;

fn oracle(c: &mut Criterion) {
    let quad = GridDomain::quadrilateral(2.0, 1.0, 64).unwrap();
    c.bench_function("quad_modulus_64", |b| b.iter(|| quad_modulus(black_box(&quad)).unwrap()));
    let ann = GridDomain::annulus((-std::f64::consts::PI).exp(), 1.0, 64).unwrap();
    c.bench_function("annulus_modulus_64", |b| b.iter(|| annulus_modulus(black_box(&ann)).unwrap()));
}

fn quasisymmetry(c: &mut Criterion) {
    let search = QsSearch::default();
    c.bench_function("qs_sup_cubic_200", |b| {
        b.iter(|| quasisymmetry_sup(|x| x * x * x, black_box(&search)).unwrap())
    });
}

fn assemble(c: &mut Criterion) {
    let psi = vec![Complex64::new(1.0, 0.0)];
    let specs: Vec<AnnulusSpec> = (0..4)
        .flat_map(|j| {
            let psi = psi.clone();
            [1u8, 2].map(move |side| AnnulusSpec {
                cylinder: j,
                side,
                params: InterpolationParams::new(1.0 + j as f64, 0.5, Complex64::new(1.0, 0.0), psi.clone(), 0.1)
                    .unwrap(),
                k_h: 1.0,
            })
        })
        .collect();
    c.bench_function("assemble_f_8_annuli", |b| b.iter(|| assemble_f(black_box(&specs), 5.0).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = oracle, quasisymmetry, assemble
}
criterion_main!(benches);
