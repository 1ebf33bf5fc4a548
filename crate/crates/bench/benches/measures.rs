use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qdisturb::linalg::{eig_hermitian, pauli, DEFAULT_CLUSTER_TOL};
use qdisturb::measures::{eta_bar, eta_o, jpd, wjd, EtaBarOptions};
use qdisturb::model::{heisenberg, lift_system, Observable, QState};
use qdisturb::random::{case_rng, random_hermitian};
use qdisturb::scenarios::{random_local_model, sweep_row};

fn spectral(c: &mut Criterion) {
    let mut rng = case_rng(1, 0);
    for n in [4, 8, 16] {
        let h = random_hermitian(n, &mut rng);
        c.bench_function(&format!("eig_hermitian_{n}"), |b| {
            b.iter(|| eig_hermitian(black_box(&h), DEFAULT_CLUSTER_TOL).unwrap())
        });
    }
}

fn distributions(c: &mut Criterion) {
    let model = random_local_model(&mut case_rng(2, 0)).unwrap();
    let psi = QState::phi_plus();
    let x1 = Observable::on_subsystem(&pauli::x(), &[2, 2], 0, "σx1").unwrap();
    let x2 = Observable::on_subsystem(&pauli::x(), &[2, 2], 1, "σx2").unwrap();
    let state = model.initial_state(&psi).unwrap();
    let x1_0 = lift_system(&x1, &model).unwrap();
    let x2_0 = lift_system(&x2, &model).unwrap();
    let x2_t = heisenberg(&x2_0, &model).unwrap();

    c.bench_function("eta_o_local", |b| {
        b.iter(|| eta_o(&model, black_box(&x2), &psi).unwrap())
    });
    c.bench_function("jpd_8x", |b| {
        b.iter(|| jpd(&x1_0, black_box(&x2_t), &state).unwrap())
    });
    c.bench_function("wjd_8x", |b| {
        b.iter(|| wjd(&x2_t, black_box(&x2_0), &state).unwrap())
    });
    c.bench_function("eta_bar_local", |b| {
        b.iter(|| eta_bar(&model, black_box(&x2), &psi, EtaBarOptions::default()).unwrap())
    });
    c.bench_function("sweep_row", |b| {
        b.iter(|| sweep_row(black_box(0.7)).unwrap())
    });
}

criterion_group!(benches, spectral, distributions);
criterion_main!(benches);
