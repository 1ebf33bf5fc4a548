//! Seeded random states, observables and unitaries for audits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, ComplexMatrix};
use crate::model::{Observable, QState};

pub type AuditRng = ChaCha8Rng;

/// Deterministic generator for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> AuditRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random state on `dims`.
pub fn random_state(dims: &[usize], rng: &mut impl Rng) -> QState {
    let n: usize = dims.iter().product();
    let amps: Vec<Complex64> = (0..n).map(|_| gaussian_complex(rng)).collect();
    QState::normalized(dims.to_vec(), amps).expect("gaussian vector is nonzero")
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..n {
            out.set(i, j, q[(i, j)] * phase);
        }
    }
    out
}

/// GUE-like random Hermitian matrix.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::new(n, n, (0..n * n).map(|_| gaussian_complex(rng)).collect())
        .expect("finite entries");
    g.add(&g.dagger()).expect("square").scale_real(0.5)
}

pub fn random_observable(n: usize, rng: &mut impl Rng, label: &str) -> Observable {
    Observable::new(random_hermitian(n, rng), label).expect("Hermitian by construction")
}

/// `V diag(±1) V†` with both signs present when `n ≥ 2`.
pub fn random_dichotomic(n: usize, rng: &mut impl Rng, label: &str) -> Observable {
    let v = haar_unitary(n, rng);
    let plus = if n >= 2 { rng.random_range(1..n) } else { 1 };
    let signs: Vec<f64> = (0..n).map(|k| if k < plus { 1.0 } else { -1.0 }).collect();
    observable_with_spectrum(&v, &signs, label)
}

/// `V diag(values) V†`.
pub fn observable_with_spectrum(v: &ComplexMatrix, values: &[f64], label: &str) -> Observable {
    let m = v
        .matmul(&ComplexMatrix::diagonal(values))
        .and_then(|x| x.matmul(&v.dagger()))
        .expect("square");
    let m = m.add(&m.dagger()).expect("square").scale_real(0.5);
    Observable::new(m, label).expect("Hermitian by construction")
}
