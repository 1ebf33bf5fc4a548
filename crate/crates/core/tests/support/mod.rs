//! Dense complex algebra on nested vectors, independent of the crate's
//! matrix type and eigensolver. Used as a test oracle.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qdisturb::linalg::ComplexMatrix;
use qdisturb::model::QState;

pub type M = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn eye(n: usize) -> M {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

pub fn real(rows: &[&[f64]]) -> M {
    rows.iter()
        .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
        .collect()
}

pub fn sx() -> M {
    real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn sy() -> M {
    vec![
        vec![c(0.0, 0.0), c(0.0, -1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ]
}

pub fn sz() -> M {
    real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn s_theta(theta: f64) -> M {
    add(&scale(&sz(), theta.cos()), &scale(&sx(), theta.sin()))
}

pub fn mul(a: &M, b: &M) -> M {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn dag(a: &M) -> M {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j].conj()).collect())
        .collect()
}

pub fn kron(a: &M, b: &M) -> M {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    (0..ra * rb)
        .map(|i| {
            (0..ca * cb)
                .map(|j| a[i / rb][j / cb] * b[i % rb][j % cb])
                .collect()
        })
        .collect()
}

pub fn kron3(a: &M, b: &M, d: &M) -> M {
    kron(&kron(a, b), d)
}

pub fn add(a: &M, b: &M) -> M {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

pub fn sub(a: &M, b: &M) -> M {
    add(a, &scale(b, -1.0))
}

pub fn scale(a: &M, s: f64) -> M {
    a.iter()
        .map(|r| r.iter().map(|z| z * s).collect())
        .collect()
}

pub fn apply(a: &M, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron_vec(a: &[C], b: &[C]) -> Vec<C> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// `U† X U`
pub fn conj_by(u: &M, x: &M) -> M {
    mul(&dag(u), &mul(x, u))
}

/// Spectral projector of a dichotomic observable, `(I ± X)/2`.
pub fn half(x: &M, sign: f64) -> M {
    scale(&add(&eye(x.len()), &scale(x, sign)), 0.5)
}

/// `⟨Ψ|P^X(u)P^Y(v)|Ψ⟩` for dichotomic `X`, `Y`.
pub fn dichotomic_joint(x: &M, y: &M, psi: &[C], u: f64, v: f64) -> C {
    inner(psi, &apply(&mul(&half(x, u), &half(y, v)), psi))
}

pub fn phi_plus() -> Vec<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]
}

pub fn ket0() -> Vec<C> {
    vec![c(1.0, 0.0), c(0.0, 0.0)]
}

/// `Σ_± I⊗P^{σθ}(±)⊗X^{(1∓1)/2}` on qubit ⊗ qubit ⊗ probe.
pub fn sigma_theta_unitary(theta: f64) -> M {
    let st = s_theta(theta);
    add(
        &kron3(&eye(2), &half(&st, 1.0), &eye(2)),
        &kron3(&eye(2), &half(&st, -1.0), &sx()),
    )
}

pub fn cnot() -> M {
    real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn from_crate(m: &ComplexMatrix) -> M {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

pub fn state_vec(s: &QState) -> Vec<C> {
    s.amplitudes().to_vec()
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
