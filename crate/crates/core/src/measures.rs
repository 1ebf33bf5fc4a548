//! Error and disturbance measures, joint distributions and the
//! non-disturbance classifications.
//!
//! Conventions: system-level functions (`epsilon_o`, `eta_o`, the
//! classifications) take system observables and a system state `|ψ⟩`, lift
//! them with the model and evaluate in `|ψ, ξ⟩`. Distribution functions
//! (`jpd`, `wjd`, `commutes_in_state`) take observables and a state on the
//! same space, whatever that space is.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, inner, vec_norm, vec_sub, ComplexMatrix, SpectralDecomposition, ZERO};
use crate::model::{
    check_dim, heisenberg, lift_probe, lift_system, MeasurementModel, Observable, QState,
};

/// Default absolute tolerance for the boolean classifications.
pub const DEFAULT_TOL: f64 = 1e-7;

/// JPD weights in `[-NEGATIVITY_TOL, 0)` are treated as rounding and clamped.
pub const NEGATIVITY_TOL: f64 = 1e-10;

/// Joint weights at or below this magnitude are rounding residue and set to zero.
pub const ROUNDING_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionKind {
    #[serde(rename = "JPD")]
    Jpd,
    #[serde(rename = "WJD")]
    Wjd,
}

/// Joint (or weak joint) distribution over eigenvalue pairs `(u, v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct JointDistribution {
    kind: DistributionKind,
    u_values: Vec<f64>,
    v_values: Vec<f64>,
    /// `weights[i][j]` is the weight of `(u_values[i], v_values[j])`.
    weights: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    kind: DistributionKind,
    u: Vec<f64>,
    v: Vec<f64>,
    weights: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DistributionRepr> for JointDistribution {
    type Error = Error;

    fn try_from(r: DistributionRepr) -> Result<Self> {
        if r.weights.len() != r.u.len() {
            return Err(Error::DimensionMismatch {
                context: "distribution rows",
                expected: r.u.len(),
                found: r.weights.len(),
            });
        }
        if let Some(row) = r.weights.iter().find(|row| row.len() != r.v.len()) {
            return Err(Error::DimensionMismatch {
                context: "distribution columns",
                expected: r.v.len(),
                found: row.len(),
            });
        }
        let weights = r
            .weights
            .iter()
            .map(|row| row.iter().map(|&[re, im]| c(re, im)).collect())
            .collect();
        Ok(JointDistribution {
            kind: r.kind,
            u_values: r.u,
            v_values: r.v,
            weights,
        })
    }
}

impl From<JointDistribution> for DistributionRepr {
    fn from(d: JointDistribution) -> Self {
        DistributionRepr {
            kind: d.kind,
            u: d.u_values,
            v: d.v_values,
            weights: d
                .weights
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl JointDistribution {
    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u_values
    }

    pub fn v_values(&self) -> &[f64] {
        &self.v_values
    }

    pub fn weights(&self) -> &[Vec<Complex64>] {
        &self.weights
    }

    /// Weight at indices `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.weights[i][j]
    }

    /// Weight at eigenvalues `(u, v)`; zero when either value is absent.
    pub fn weight(&self, u: f64, v: f64) -> Complex64 {
        match (find_value(&self.u_values, u), find_value(&self.v_values, v)) {
            (Some(i), Some(j)) => self.weights[i][j],
            _ => ZERO,
        }
    }

    /// Real weight; only meaningful for JPDs.
    pub fn prob(&self, u: f64, v: f64) -> f64 {
        self.weight(u, v).re
    }

    /// Marginal over `v`, indexed like `u_values`.
    pub fn marginal_u(&self) -> Vec<Complex64> {
        self.weights.iter().map(|row| row.iter().sum()).collect()
    }

    /// Marginal over `u`, indexed like `v_values`.
    pub fn marginal_v(&self) -> Vec<Complex64> {
        (0..self.v_values.len())
            .map(|j| self.weights.iter().map(|row| row[j]).sum())
            .collect()
    }

    pub fn total(&self) -> Complex64 {
        self.weights.iter().flatten().sum()
    }

    /// Largest `|weight|` over cells with `u ≠ v`.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, &u) in self.u_values.iter().enumerate() {
            for (j, &v) in self.v_values.iter().enumerate() {
                if !values_match(u, v) {
                    worst = worst.max(self.weights[i][j].norm());
                }
            }
        }
        worst
    }
}

const VALUE_MATCH_TOL: f64 = 1e-8;

fn values_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_MATCH_TOL * a.abs().max(b.abs()).max(1.0)
}

fn find_value(values: &[f64], x: f64) -> Option<usize> {
    values.iter().position(|&v| values_match(v, x))
}

/// Sorted union of two spectra, merging values that match.
fn union_values(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| values_match(*x, *y));
    all
}

/// Joint distribution over several mutually commuting observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiDistribution {
    pub labels: Vec<String>,
    /// Eigenvalues of each observable, ascending.
    pub values: Vec<Vec<f64>>,
    /// Row-major weights with the first observable varying slowest.
    pub weights: Vec<f64>,
}

impl MultiDistribution {
    /// Probability of the outcome tuple `outcome` (one value per observable).
    pub fn prob(&self, outcome: &[f64]) -> f64 {
        let mut index = 0;
        for (vals, &x) in self.values.iter().zip(outcome) {
            match find_value(vals, x) {
                Some(k) => index = index * vals.len() + k,
                None => return 0.0,
            }
        }
        self.weights[index]
    }
}

fn project_all(spectral: &SpectralDecomposition, psi: &[Complex64]) -> Vec<Vec<Complex64>> {
    spectral
        .projectors()
        .iter()
        .map(|p| p.apply(psi).expect("dimension checked by caller"))
        .collect()
}

/// `σ(X) = (⟨X²⟩ − ⟨X⟩²)^{1/2}`, clamped at zero.
pub fn sigma(x: &Observable, state: &QState) -> Result<f64> {
    check_dim("observable vs state", x.dim(), state.dim())?;
    let xpsi = x.matrix().apply(state.amplitudes())?;
    let mean = inner(state.amplitudes(), &xpsi).re;
    let second = inner(&xpsi, &xpsi).re;
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// Operator-based error `⟨ψ,ξ|(M(τ) − A(0))²|ψ,ξ⟩^{1/2}`.
pub fn epsilon_o(model: &MeasurementModel, a: &Observable, psi: &QState) -> Result<f64> {
    let state = model.initial_state(psi)?;
    let a0 = lift_system(a, model)?;
    let mt = heisenberg(&lift_probe(model.meter(), model)?, model)?;
    let noise = mt.matrix().sub(a0.matrix())?;
    Ok(vec_norm(&noise.apply(state.amplitudes())?))
}

/// Operator-based disturbance `⟨ψ,ξ|(B(τ) − B(0))²|ψ,ξ⟩^{1/2}`.
pub fn eta_o(model: &MeasurementModel, b: &Observable, psi: &QState) -> Result<f64> {
    let state = model.initial_state(psi)?;
    let difference = disturbance_operator(model, b)?;
    Ok(vec_norm(&difference.apply(state.amplitudes())?))
}

/// `B(τ) − B(0)` on the composite space.
fn disturbance_operator(model: &MeasurementModel, b: &Observable) -> Result<ComplexMatrix> {
    let (b0, bt) = evolve_pair(model, b)?;
    bt.matrix().sub(b0.matrix())
}

/// `(B(0), B(τ))`.
pub fn evolve_pair(model: &MeasurementModel, b: &Observable) -> Result<(Observable, Observable)> {
    let b0 = lift_system(b, model)?;
    let bt = heisenberg(&b0, model)?;
    Ok((b0, bt))
}

/// Largest `‖[P^X(u), P^Y(v)]Ψ‖` over all eigenvalue pairs.
pub fn commutator_defect_in_state(x: &Observable, y: &Observable, state: &QState) -> Result<f64> {
    check_dim("first observable vs state", x.dim(), state.dim())?;
    check_dim("second observable vs state", y.dim(), state.dim())?;
    let psi = state.amplitudes();
    let px_psi: Vec<_> = project_all(x.spectral(), psi);
    let py_psi: Vec<_> = project_all(y.spectral(), psi);
    let mut worst = 0.0_f64;
    for (px, px_psi) in x.spectral().projectors().iter().zip(&px_psi) {
        for (py, py_psi) in y.spectral().projectors().iter().zip(&py_psi) {
            let xy = px.apply(py_psi)?;
            let yx = py.apply(px_psi)?;
            worst = worst.max(vec_norm(&vec_sub(&xy, &yx)));
        }
    }
    Ok(worst)
}

/// Whether `P^X(u)P^Y(v)|Ψ⟩ = P^Y(v)P^X(u)|Ψ⟩` for all `(u, v)` within `tol`.
pub fn commutes_in_state(x: &Observable, y: &Observable, state: &QState, tol: f64) -> bool {
    commutator_defect_in_state(x, y, state).is_ok_and(|d| d <= tol)
}

/// `⟨Ψ|P^X(u)P^Y(v)|Ψ⟩` for every pair.
fn product_weights(x: &Observable, y: &Observable, state: &QState) -> Result<Vec<Vec<Complex64>>> {
    check_dim("first observable vs state", x.dim(), state.dim())?;
    check_dim("second observable vs state", y.dim(), state.dim())?;
    let psi = state.amplitudes();
    let px_psi = project_all(x.spectral(), psi);
    let py_psi = project_all(y.spectral(), psi);
    // ⟨Ψ|P^X P^Y|Ψ⟩ = ⟨P^X Ψ|P^Y Ψ⟩
    Ok(px_psi
        .iter()
        .map(|a| py_psi.iter().map(|b| inner(a, b)).collect())
        .collect())
}

/// Joint probability distribution of `x` and `y` in `state`.
///
/// Exists only when the pair commutes in the state (tolerance [`DEFAULT_TOL`]).
pub fn jpd(x: &Observable, y: &Observable, state: &QState) -> Result<JointDistribution> {
    jpd_with_tol(x, y, state, DEFAULT_TOL)
}

pub fn jpd_with_tol(
    x: &Observable,
    y: &Observable,
    state: &QState,
    tol: f64,
) -> Result<JointDistribution> {
    let defect = commutator_defect_in_state(x, y, state)?;
    if defect > tol {
        return Err(Error::NotCommutingInState { defect });
    }
    let raw = product_weights(x, y, state)?;
    let mut weights: Vec<Vec<Complex64>> = Vec::with_capacity(raw.len());
    for row in raw {
        let mut out = Vec::with_capacity(row.len());
        for z in row {
            let p = z.re;
            if p < -NEGATIVITY_TOL {
                return Err(Error::InternalConsistency(format!(
                    "joint probability {p:.3e} is negative for a pair that commutes in the state"
                )));
            }
            out.push(c(if p <= ROUNDING_FLOOR { 0.0 } else { p }, 0.0));
        }
        weights.push(out);
    }
    let total: f64 = weights.iter().flatten().map(|z| z.re).sum();
    if total > 0.0 {
        for z in weights.iter_mut().flatten() {
            *z /= total;
        }
    }
    Ok(JointDistribution {
        kind: DistributionKind::Jpd,
        u_values: x.spectral().eigenvalues().to_vec(),
        v_values: y.spectral().eigenvalues().to_vec(),
        weights,
    })
}

/// Weak joint distribution `⟨Ψ|P^X(u)P^Y(v)|Ψ⟩`; always defined, possibly complex.
pub fn wjd(x: &Observable, y: &Observable, state: &QState) -> Result<JointDistribution> {
    Ok(JointDistribution {
        kind: DistributionKind::Wjd,
        u_values: x.spectral().eigenvalues().to_vec(),
        v_values: y.spectral().eigenvalues().to_vec(),
        weights: product_weights(x, y, state)?,
    })
}

/// Joint distribution of several pairwise commuting observables.
pub fn jpd_multi(
    observables: &[&Observable],
    state: &QState,
    tol: f64,
) -> Result<MultiDistribution> {
    for (k, x) in observables.iter().enumerate() {
        check_dim("observable vs state", x.dim(), state.dim())?;
        for y in &observables[k + 1..] {
            let defect = x.matrix().commutator(y.matrix())?.norm();
            if defect > tol {
                return Err(Error::NotCommutingInState { defect });
            }
        }
    }
    let values: Vec<Vec<f64>> = observables
        .iter()
        .map(|o| o.spectral().eigenvalues().to_vec())
        .collect();
    let mut weights = Vec::new();
    let mut index = vec![0usize; observables.len()];
    'outer: loop {
        // P_1 P_2 … P_n Ψ, applied right to left
        let mut v = state.amplitudes().to_vec();
        for (o, &k) in observables.iter().zip(&index).rev() {
            v = o.spectral().projectors()[k].apply(&v)?;
        }
        let p = inner(state.amplitudes(), &v).re;
        weights.push(if p <= ROUNDING_FLOOR { 0.0 } else { p });
        for pos in (0..index.len()).rev() {
            index[pos] += 1;
            if index[pos] < values[pos].len() {
                continue 'outer;
            }
            index[pos] = 0;
        }
        break;
    }
    Ok(MultiDistribution {
        labels: observables.iter().map(|o| o.label().to_string()).collect(),
        values,
        weights,
    })
}

/// Gauss's root-mean-square deviation `(Σ (u − v)² μ(u, v))^{1/2}`.
pub fn delta_g(d: &JointDistribution) -> Result<f64> {
    if d.kind != DistributionKind::Jpd {
        return Err(Error::WjdNotClassical);
    }
    let mut sum = 0.0;
    for (i, &u) in d.u_values.iter().enumerate() {
        for (j, &v) in d.v_values.iter().enumerate() {
            sum += (u - v).powi(2) * d.weights[i][j].re;
        }
    }
    Ok(sum.max(0.0).sqrt())
}

/// `μ(u | v) = μ(u, v) / Σ_u μ(u, v)` as `(u, probability)` pairs.
pub fn conditional(d: &JointDistribution, given_v: f64) -> Result<Vec<(f64, f64)>> {
    if d.kind != DistributionKind::Jpd {
        return Err(Error::WjdNotClassical);
    }
    let j = find_value(&d.v_values, given_v).ok_or(Error::ZeroMarginal { value: given_v })?;
    let marginal: f64 = d.weights.iter().map(|row| row[j].re).sum();
    if marginal <= NEGATIVITY_TOL {
        return Err(Error::ZeroMarginal { value: given_v });
    }
    Ok(d.u_values
        .iter()
        .zip(&d.weights)
        .map(|(&u, row)| (u, row[j].re / marginal))
        .collect())
}

/// Spectral distribution of `x` in `state` as `(value, probability)`.
pub fn spectral_distribution(x: &Observable, state: &QState) -> Result<Vec<(f64, f64)>> {
    check_dim("observable vs state", x.dim(), state.dim())?;
    x.spectral()
        .iter()
        .map(|(value, p)| Ok((value, p.expectation(state.amplitudes())?.re)))
        .collect()
}

/// Largest pointwise difference between the distributions of `B(0)` and `B(τ)`.
pub fn distributional_deviation(
    model: &MeasurementModel,
    b: &Observable,
    psi: &QState,
) -> Result<f64> {
    let state = model.initial_state(psi)?;
    let (b0, bt) = evolve_pair(model, b)?;
    let before = spectral_distribution(&b0, &state)?;
    let after = spectral_distribution(&bt, &state)?;
    let lookup = |dist: &[(f64, f64)], x: f64| {
        dist.iter()
            .find(|(v, _)| values_match(*v, x))
            .map_or(0.0, |&(_, p)| p)
    };
    let values = union_values(
        &before.iter().map(|p| p.0).collect::<Vec<_>>(),
        &after.iter().map(|p| p.0).collect::<Vec<_>>(),
    );
    Ok(values
        .iter()
        .map(|&x| (lookup(&before, x) - lookup(&after, x)).abs())
        .fold(0.0, f64::max))
}

/// Whether `B(0)` and `B(τ)` have identical distributions in `|ψ, ξ⟩`.
pub fn is_distributionally_nondisturbing(
    model: &MeasurementModel,
    b: &Observable,
    psi: &QState,
    tol: f64,
) -> Result<bool> {
    Ok(distributional_deviation(model, b, psi)? <= tol)
}

/// The three equivalent characterizations of a properly non-disturbing
/// measurement, each evaluated on its own.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProperNonDisturbance {
    pub verdict: bool,
    /// `B(τ)`, `B(0)` commute in the state and their JPD vanishes off the diagonal.
    pub jpd_diagonal: bool,
    /// The WJD vanishes off the diagonal.
    pub wjd_diagonal: bool,
    /// `P^{B(τ)}(u)|ψ,ξ⟩ = P^{B(0)}(u)|ψ,ξ⟩` for every `u`.
    pub projector_transfer_holds: bool,
    pub tol: f64,
}

impl ProperNonDisturbance {
    pub fn flags_agree(&self) -> bool {
        self.jpd_diagonal == self.wjd_diagonal && self.wjd_diagonal == self.projector_transfer_holds
    }
}

pub fn is_properly_nondisturbing(
    model: &MeasurementModel,
    b: &Observable,
    psi: &QState,
    tol: f64,
) -> Result<ProperNonDisturbance> {
    let state = model.initial_state(psi)?;
    let (b0, bt) = evolve_pair(model, b)?;
    proper_nondisturbance_of(&bt, &b0, &state, tol)
}

/// Classification for an arbitrary pair `(B(τ), B(0))` already on the composite space.
pub fn proper_nondisturbance_of(
    bt: &Observable,
    b0: &Observable,
    state: &QState,
    tol: f64,
) -> Result<ProperNonDisturbance> {
    let weak = wjd(bt, b0, state)?;
    let wjd_diagonal = weak.max_off_diagonal() <= tol;

    let jpd_diagonal = commutes_in_state(bt, b0, state, tol) && weak.max_off_diagonal() <= tol;

    let psi = state.amplitudes();
    let values = union_values(bt.spectral().eigenvalues(), b0.spectral().eigenvalues());
    let zero = vec![ZERO; psi.len()];
    let mut transfer_defect = 0.0_f64;
    for u in values {
        let after = match bt.spectral().projector_for(u) {
            Some(p) => p.apply(psi)?,
            None => zero.clone(),
        };
        let before = match b0.spectral().projector_for(u) {
            Some(p) => p.apply(psi)?,
            None => zero.clone(),
        };
        transfer_defect = transfer_defect.max(vec_norm(&vec_sub(&after, &before)));
    }
    let projector_transfer_holds = transfer_defect <= tol;

    Ok(ProperNonDisturbance {
        verdict: wjd_diagonal,
        jpd_diagonal,
        wjd_diagonal,
        projector_transfer_holds,
        tol,
    })
}

/// `(Σ_v ‖[P^A(v), B]|ψ⟩‖²)^{1/2}`: the disturbance of a projective
/// measurement of `a` on `b`, evaluated without a probe.
pub fn eta_projective_commutator(a: &Observable, b: &Observable, state: &QState) -> Result<f64> {
    check_dim("observables", a.dim(), b.dim())?;
    check_dim("observable vs state", a.dim(), state.dim())?;
    let mut sum = 0.0;
    for p in a.spectral().projectors() {
        let comm = p.commutator(b.matrix())?;
        sum += vec_norm(&comm.apply(state.amplitudes())?).powi(2);
    }
    Ok(sum.sqrt())
}

/// Search settings for [`eta_bar`].
#[derive(Clone, Copy, Debug)]
pub struct EtaBarOptions {
    /// Grid points per base period `2π / (smallest eigenvalue gap)`.
    pub points_per_period: usize,
    /// Golden-section refinement stops when the bracket is narrower than this.
    pub refine_tol: f64,
    /// Relative tolerance for recognizing gap ratios as rationals.
    pub rational_tol: f64,
    /// Largest common denominator accepted for the gap ratios; beyond it the
    /// spectrum is treated as incommensurate and the window is truncated.
    pub max_denominator: u64,
}

impl Default for EtaBarOptions {
    fn default() -> Self {
        Self {
            points_per_period: 4096,
            refine_tol: 1e-10,
            rational_tol: 1e-6,
            max_denominator: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaBar {
    pub value: f64,
    /// The `t` at which `value` was attained.
    pub t: f64,
    /// Length of the searched window.
    pub window: f64,
    /// True when the searched window covers a full period of `t ↦ e^{−itB}`.
    /// When false `value` is only a lower bound of the supremum.
    pub full_period: bool,
    /// True when `B² = I`, where the supremum equals `η_O`.
    pub dichotomic: bool,
}

/// Locally uniform disturbance `sup_t η_O(B, M, e^{−itB}|ψ⟩)`.
///
/// Evaluated on a dense grid over one period followed by golden-section
/// refinement around the best grid point; every reported value is attained,
/// so the result never exceeds the true supremum.
pub fn eta_bar(
    model: &MeasurementModel,
    b: &Observable,
    psi: &QState,
    opts: EtaBarOptions,
) -> Result<EtaBar> {
    check_dim("system observable", model.system_dim(), b.dim())?;
    check_dim("system state", model.system_dim(), psi.dim())?;
    let difference = disturbance_operator(model, b)?;
    let spectral = b.spectral();
    let components: Vec<Vec<Complex64>> = project_all(spectral, psi.amplitudes());
    let eigenvalues = spectral.eigenvalues().to_vec();
    let xi = model.probe_state().amplitudes().to_vec();

    let eval = |t: f64| -> f64 {
        let mut rotated = vec![ZERO; psi.dim()];
        for (lambda, comp) in eigenvalues.iter().zip(&components) {
            let phase = Complex64::from_polar(1.0, -t * lambda);
            for (r, x) in rotated.iter_mut().zip(comp) {
                *r += phase * x;
            }
        }
        let joint = crate::linalg::kron_vec(&rotated, &xi);
        vec_norm(&difference.apply(&joint).expect("dimension checked"))
    };

    let dichotomic = b.is_dichotomic();
    let at_zero = eval(0.0);
    if eigenvalues.len() < 2 {
        return Ok(EtaBar {
            value: at_zero,
            t: 0.0,
            window: 0.0,
            full_period: true,
            dichotomic,
        });
    }

    let (base_gap, multiplier, full_period) = period_structure(&eigenvalues, opts);
    let window = 2.0 * PI / base_gap * multiplier as f64;
    let n = opts.points_per_period * multiplier as usize;
    let step = window / n as f64;

    let (mut best_t, mut best) = (0.0, at_zero);
    for k in 1..n {
        let t = k as f64 * step;
        let v = eval(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }

    // golden-section maximization on [best_t − step, best_t + step]
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    while hi - lo > opts.refine_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval(x1);
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_t = t;
        }
    }

    Ok(EtaBar {
        value: best,
        t: best_t,
        window,
        full_period,
        dichotomic,
    })
}

/// Smallest positive eigenvalue difference `g` and the multiplier `L` such
/// that `2πL/g` is a common period of every phase `e^{−it(λ_j − λ_0)}`.
fn period_structure(eigenvalues: &[f64], opts: EtaBarOptions) -> (f64, u64, bool) {
    let base = eigenvalues[0];
    let gaps: Vec<f64> = eigenvalues[1..].iter().map(|&x| x - base).collect();
    let smallest = eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let mut lcm = 1u64;
    for gap in gaps {
        match rational_approx(gap / smallest, opts.rational_tol, opts.max_denominator) {
            Some((_, q)) => {
                lcm = lcm / gcd(lcm, q) * q;
                if lcm > opts.max_denominator {
                    return (smallest, opts.max_denominator, false);
                }
            }
            None => return (smallest, opts.max_denominator, false),
        }
    }
    (smallest, lcm, true)
}

/// Continued-fraction approximation `p/q` of `x` with `q ≤ max_q`.
fn rational_approx(x: f64, rel_tol: f64, max_q: u64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..32 {
        let a = r.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as u64 * k1 + k0);
        if k2 > max_q {
            return None;
        }
        if (h2 as f64 / k2 as f64 - x).abs() <= rel_tol * x.abs().max(1.0) {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
