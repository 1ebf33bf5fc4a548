//! Dense complex matrices and Hermitian spectral decomposition.
//!
//! Everything downstream (states, unitaries, observables) is carried by
//! [`ComplexMatrix`]. Matrices are small (composite dimensions of a few
//! qubits), so a plain row-major `Vec` is all we need.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default eigenvalue clustering tolerance, relative to `max(1, spectral radius)`.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Tolerance used when validating Hermiticity, unitarity and projector identities.
pub const STRUCTURE_TOL: f64 = 1e-9;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Wire form: `{"rows": n, "cols": m, "entries": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let entries = repr.entries.iter().map(|&[re, im]| c(re, im)).collect();
        ComplexMatrix::new(repr.rows, repr.cols, entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self.get(r, col);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * n + i] = c(v, 0.0);
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input; intended for literals.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged matrix literal");
        Self {
            rows: n,
            cols: m,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Rank-one outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m.entries[i * b.len() + j] = ai * bj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, col: usize) -> Complex64 {
        self.entries[r * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, r: usize, col: usize, z: Complex64) {
        self.entries[r * self.cols + col] = z;
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul inner dimension",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.entries[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entries[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Kronecker product; `self`'s index varies slowest.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.entries[(i * other.rows + k) * cols + j * other.cols + l] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "matrix add", |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "matrix sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        context: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, z: Complex64) -> ComplexMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&a| a * z).collect(),
        }
    }

    pub fn scale_real(&self, x: f64) -> ComplexMatrix {
        self.scale(c(x, 0.0))
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`; dimension mismatch counts as infinite.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.dagger()).map_or(f64::INFINITY, |d| d.norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `‖U†U − I‖` (Frobenius).
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.dagger()
            .matmul(self)
            .and_then(|p| p.sub(&Self::identity(self.rows)))
            .map_or(f64::INFINITY, |d| d.norm())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .entries
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &[Complex64]) -> Result<Complex64> {
        Ok(inner(v, &self.apply(v)?))
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Clustered spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    cluster_tol: f64,
}

impl SpectralDecomposition {
    /// Distinct eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Absolute tolerance that was used to merge eigenvalues.
    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn iter(
        &self,
    ) -> impl DoubleEndedIterator + ExactSizeIterator<Item = (f64, &ComplexMatrix)> {
        self.eigenvalues.iter().copied().zip(&self.projectors)
    }

    /// Projector for the eigenvalue matching `value` within the clustering tolerance.
    pub fn projector_for(&self, value: f64) -> Option<&ComplexMatrix> {
        self.index_of(value).map(|i| &self.projectors[i])
    }

    pub fn index_of(&self, value: f64) -> Option<usize> {
        self.eigenvalues
            .iter()
            .position(|&e| (e - value).abs() <= self.cluster_tol)
    }

    /// `Σ λ P`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.projectors.first().map_or(0, ComplexMatrix::rows);
        self.iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, (lambda, p)| {
                acc.add(&p.scale_real(lambda))
                    .expect("projectors share dimension")
            })
    }

    /// `f(A) = Σ f(λ) P`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.projectors.first().map_or(0, ComplexMatrix::rows);
        self.iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, (lambda, p)| {
                acc.add(&p.scale(f(lambda)))
                    .expect("projectors share dimension")
            })
    }
}

/// Spectral decomposition of a Hermitian matrix with degeneracy clustering.
///
/// Eigenvalues closer than `cluster_tol · max(1, ρ(a))` (ρ the spectral radius)
/// are chained into one cluster whose projector is the sum of the members'
/// rank-one eigenprojectors and whose value is the members' mean.
pub fn eig_hermitian(a: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralDecomposition> {
    if cluster_tol.is_nan() || cluster_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cluster tolerance must be positive, got {cluster_tol}"
        )));
    }
    let defect = a.hermiticity_defect();
    if defect > STRUCTURE_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let n = a.rows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = a.add(&a.dagger())?.scale_real(0.5);
    let m = DMatrix::from_fn(n, n, |i, j| sym.get(i, j));
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let radius = eig.eigenvalues.iter().fold(0.0_f64, |r, &x| r.max(x.abs()));
    let tol = cluster_tol * radius.max(1.0);

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let flush = |members: &mut Vec<usize>,
                 eigenvalues: &mut Vec<f64>,
                 projectors: &mut Vec<ComplexMatrix>| {
        if members.is_empty() {
            return;
        }
        let mean = members.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / members.len() as f64;
        let mut p = ComplexMatrix::zeros(n, n);
        for &k in members.iter() {
            let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            p = p
                .add(&ComplexMatrix::outer(&v, &v))
                .expect("same dimension");
        }
        eigenvalues.push(mean);
        projectors.push(p);
        members.clear();
    };
    let mut last: Option<f64> = None;
    for &k in &order {
        let lambda = eig.eigenvalues[k];
        if let Some(prev) = last {
            if lambda - prev > tol {
                flush(&mut members, &mut eigenvalues, &mut projectors);
            }
        }
        members.push(k);
        last = Some(lambda);
    }
    flush(&mut members, &mut eigenvalues, &mut projectors);

    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        cluster_tol: tol,
    })
}

/// Pauli matrices and friends.
pub mod pauli {
    use super::{c, ComplexMatrix, ONE, ZERO};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// `σ_θ = cos θ σ_z + sin θ σ_x`.
    pub fn theta(theta: f64) -> ComplexMatrix {
        let (s, co) = theta.sin_cos();
        ComplexMatrix::from_real_rows(&[&[co, s], &[s, -co]])
    }

    /// `|0⟩⟨0|` and `|1⟩⟨1|`.
    pub fn ket0_proj() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, ZERO]])
    }

    pub fn ket1_proj() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ZERO], vec![ZERO, ONE]])
    }
}
