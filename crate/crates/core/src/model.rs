//! Indirect measurement models and Heisenberg-picture evolution.
//!
//! The composite space is ordered `(system subsystems…, probe)`, so a
//! system observable `X` is lifted to `X ⊗ I` and a probe observable `Y` to
//! `I ⊗ Y`. Only the two instants `0` and `τ` exist: `X(τ) = U† X(0) U`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, eig_hermitian, kron_vec, vec_norm, ComplexMatrix, SpectralDecomposition,
    DEFAULT_CLUSTER_TOL, ONE, STRUCTURE_TOL, ZERO,
};

/// Pure state on a tensor product of subsystems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct QState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

/// Wire form: `{"dims": [...], "amplitudes": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateRepr {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateRepr> for QState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        QState::new(
            r.dims,
            r.amplitudes.iter().map(|&[re, im]| c(re, im)).collect(),
        )
    }
}

impl From<QState> for StateRepr {
    fn from(s: QState) -> Self {
        StateRepr {
            dims: s.dims,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl QState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                context: "state amplitudes",
                expected: total,
                found: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("state amplitude"));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(dims, amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {total}"
            )));
        }
        let mut amplitudes = vec![ZERO; total];
        amplitudes[index] = ONE;
        Self::new(dims, amplitudes)
    }

    /// Single qubit `|0⟩`.
    pub fn zero() -> Self {
        Self::basis(vec![2], 0).expect("valid basis state")
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(vec![2, 2], vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).expect("normalized")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &QState) -> QState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        QState {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Returns the state rotated by a unitary on the same space.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<QState> {
        Ok(QState {
            dims: self.dims.clone(),
            amplitudes: u.apply(&self.amplitudes)?,
        })
    }
}

/// Hermitian observable with a lazily computed clustered spectral decomposition.
#[derive(Clone, Debug)]
pub struct Observable {
    matrix: ComplexMatrix,
    label: String,
    spectral: OnceLock<SpectralDecomposition>,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                context: "observable must be square",
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > STRUCTURE_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self {
            matrix,
            label: label.into(),
            spectral: OnceLock::new(),
        })
    }

    /// `I ⊗ … ⊗ local ⊗ … ⊗ I` with `local` on subsystem `index` (0-based).
    pub fn on_subsystem(
        local: &ComplexMatrix,
        dims: &[usize],
        index: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        if index >= dims.len() || dims[index] != local.rows() {
            return Err(Error::DimensionMismatch {
                context: "subsystem observable",
                expected: dims.get(index).copied().unwrap_or(0),
                found: local.rows(),
            });
        }
        let mut m = ComplexMatrix::identity(1);
        for (k, &d) in dims.iter().enumerate() {
            let factor = if k == index {
                local.clone()
            } else {
                ComplexMatrix::identity(d)
            };
            m = m.kron(&factor);
        }
        Self::new(m, label)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        self.spectral.get_or_init(|| {
            eig_hermitian(&self.matrix, DEFAULT_CLUSTER_TOL)
                .expect("validated Hermitian at construction")
        })
    }

    /// Whether `X² = I` within the structural tolerance.
    pub fn is_dichotomic(&self) -> bool {
        self.matrix
            .matmul(&self.matrix)
            .map(|sq| sq.max_abs_diff(&ComplexMatrix::identity(self.dim())) <= STRUCTURE_TOL)
            .unwrap_or(false)
    }

    pub fn expectation(&self, state: &QState) -> Result<f64> {
        check_dim("observable vs state", self.dim(), state.dim())?;
        Ok(self.matrix.expectation(state.amplitudes())?.re)
    }

    fn symmetrized(m: ComplexMatrix, label: String) -> Self {
        let m = m.add(&m.dagger()).expect("square").scale_real(0.5);
        Self {
            matrix: m,
            label,
            spectral: OnceLock::new(),
        }
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Indirect measurement model `(|ξ⟩, U, M)` on `system ⊗ probe`.
#[derive(Clone, Debug)]
pub struct MeasurementModel {
    system_dims: Vec<usize>,
    probe_dim: usize,
    probe_state: QState,
    unitary: ComplexMatrix,
    meter: Observable,
}

/// Wire form of a model file.
#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub system_dims: Vec<usize>,
    pub probe_dim: usize,
    pub probe_state: QState,
    pub unitary: ComplexMatrix,
    pub meter: ComplexMatrix,
}

impl TryFrom<ModelFile> for MeasurementModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let meter = Observable::new(f.meter, "M")?;
        MeasurementModel::new(f.system_dims, f.probe_dim, f.probe_state, f.unitary, meter)
    }
}

impl From<&MeasurementModel> for ModelFile {
    fn from(m: &MeasurementModel) -> Self {
        ModelFile {
            system_dims: m.system_dims.clone(),
            probe_dim: m.probe_dim,
            probe_state: m.probe_state.clone(),
            unitary: m.unitary.clone(),
            meter: m.meter.matrix().clone(),
        }
    }
}

impl MeasurementModel {
    pub fn new(
        system_dims: Vec<usize>,
        probe_dim: usize,
        probe_state: QState,
        unitary: ComplexMatrix,
        meter: Observable,
    ) -> Result<Self> {
        let system_dim: usize = system_dims.iter().product();
        check_dim("probe state", probe_dim, probe_state.dim())?;
        check_dim("meter", probe_dim, meter.dim())?;
        if !unitary.is_square() {
            return Err(Error::DimensionMismatch {
                context: "interaction must be square",
                expected: unitary.rows(),
                found: unitary.cols(),
            });
        }
        check_dim("interaction", system_dim * probe_dim, unitary.rows())?;
        let defect = unitary.unitarity_defect();
        if defect > STRUCTURE_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self {
            system_dims,
            probe_dim,
            probe_state,
            unitary,
            meter,
        })
    }

    /// Trivial interaction `U = I` with probe `|0⟩` and the given meter.
    pub fn no_interaction(system_dims: Vec<usize>, meter: Observable) -> Result<Self> {
        let probe_dim = meter.dim();
        let n: usize = system_dims.iter().product::<usize>() * probe_dim;
        Self::new(
            system_dims,
            probe_dim,
            QState::basis(vec![probe_dim], 0)?,
            ComplexMatrix::identity(n),
            meter,
        )
    }

    /// Model acting as `I ⊗ W` where `W` couples the last system factor with the probe.
    pub fn local_to_last(
        system_dims: Vec<usize>,
        probe_state: QState,
        local_unitary: &ComplexMatrix,
        meter: Observable,
    ) -> Result<Self> {
        let last = *system_dims
            .last()
            .ok_or_else(|| Error::InvalidParameter("system needs at least one subsystem".into()))?;
        let leading: usize = system_dims[..system_dims.len() - 1].iter().product();
        let probe_dim = meter.dim();
        check_dim("local interaction", last * probe_dim, local_unitary.rows())?;
        let u = ComplexMatrix::identity(leading).kron(local_unitary);
        Self::new(system_dims, probe_dim, probe_state, u, meter)
    }

    pub fn system_dims(&self) -> &[usize] {
        &self.system_dims
    }

    pub fn system_dim(&self) -> usize {
        self.system_dims.iter().product()
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    pub fn composite_dim(&self) -> usize {
        self.system_dim() * self.probe_dim
    }

    pub fn probe_state(&self) -> &QState {
        &self.probe_state
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn meter(&self) -> &Observable {
        &self.meter
    }

    /// `|ψ, ξ⟩`.
    pub fn initial_state(&self, psi: &QState) -> Result<QState> {
        check_dim("system state", self.system_dim(), psi.dim())?;
        Ok(psi.tensor(&self.probe_state))
    }

    /// True when `U = I ⊗ W` with `W` acting on the last system factor and the probe.
    pub fn is_local_to_last(&self) -> bool {
        let Some(&last) = self.system_dims.last() else {
            return false;
        };
        let leading: usize = self.system_dims[..self.system_dims.len() - 1]
            .iter()
            .product();
        let rest = ComplexMatrix::identity(last * self.probe_dim);
        for i in 0..leading {
            for j in 0..leading {
                let mut unit = ComplexMatrix::zeros(leading, leading);
                unit.set(i, j, ONE);
                let e = unit.kron(&rest);
                match self.unitary.commutator(&e) {
                    Ok(comm) if comm.norm() <= STRUCTURE_TOL => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// `X(0) = X ⊗ I`.
pub fn lift_system(x: &Observable, model: &MeasurementModel) -> Result<Observable> {
    check_dim("system observable", model.system_dim(), x.dim())?;
    Observable::new(
        x.matrix().kron(&ComplexMatrix::identity(model.probe_dim())),
        format!("{}(0)", x.label()),
    )
}

/// `Y(0) = I ⊗ Y`.
pub fn lift_probe(y: &Observable, model: &MeasurementModel) -> Result<Observable> {
    check_dim("probe observable", model.probe_dim(), y.dim())?;
    Observable::new(
        ComplexMatrix::identity(model.system_dim()).kron(y.matrix()),
        format!("{}(0)", y.label()),
    )
}

/// `X(τ) = U† X(0) U`.
pub fn heisenberg(x0: &Observable, model: &MeasurementModel) -> Result<Observable> {
    check_dim("composite observable", model.composite_dim(), x0.dim())?;
    let u = model.unitary();
    let evolved = u.dagger().matmul(&x0.matrix().matmul(u)?)?;
    let label = match x0.label().strip_suffix("(0)") {
        Some(base) => format!("{base}(τ)"),
        None => format!("{}(τ)", x0.label()),
    };
    Ok(Observable::symmetrized(evolved, label))
}

/// Projective measurement of `a` by a cyclic-shift pointer coupling.
///
/// Distinct eigenvalues are taken in descending order `a_0 > a_1 > …` and
/// recorded on pointer states `|0⟩, |1⟩, …`:
/// `U = Σ_i P^A(a_i) ⊗ S^i` with `S|k⟩ = |k+1 mod d⟩`, `|ξ⟩ = |0⟩`,
/// `M = Σ_i a_i |i⟩⟨i|`. Pointer states beyond the number of eigenvalues
/// carry the smallest eigenvalue. For a qubit `σ_z` and `d = 2` this is the
/// controlled-NOT `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ σ_x`.
pub fn projective_model(
    a: &Observable,
    system_dims: &[usize],
    probe_dim: usize,
) -> Result<MeasurementModel> {
    check_dim("measured observable", system_dims.iter().product(), a.dim())?;
    let spectral = a.spectral();
    let needed = spectral.len();
    if probe_dim < needed {
        return Err(Error::ProbeTooSmall { needed, probe_dim });
    }
    let descending: Vec<(f64, &ComplexMatrix)> = spectral.iter().rev().collect();

    let mut shift = ComplexMatrix::zeros(probe_dim, probe_dim);
    for k in 0..probe_dim {
        shift.set((k + 1) % probe_dim, k, ONE);
    }
    let mut u = ComplexMatrix::zeros(a.dim() * probe_dim, a.dim() * probe_dim);
    let mut power = ComplexMatrix::identity(probe_dim);
    for (_, projector) in &descending {
        u = u.add(&projector.kron(&power))?;
        power = shift.matmul(&power)?;
    }

    let smallest = descending.last().map_or(0.0, |&(v, _)| v);
    let pointer_values: Vec<f64> = (0..probe_dim)
        .map(|i| descending.get(i).map_or(smallest, |&(v, _)| v))
        .collect();
    let meter = Observable::new(ComplexMatrix::diagonal(&pointer_values), "M")?;
    MeasurementModel::new(
        system_dims.to_vec(),
        probe_dim,
        QState::basis(vec![probe_dim], 0)?,
        u,
        meter,
    )
}
