//! Randomized audits of the universal relations and the non-disturbance equivalences.
//!
//! Every case draws from its own deterministic stream (`seed`, case index),
//! so a failing case can be replayed in isolation.

use serde::{Deserialize, Serialize};

use crate::edr::{heisenberg_product, robertson, universal_edr, InequalityRecord};
use crate::error::Result;
use crate::linalg::{c, pauli, ComplexMatrix};
use crate::measures::{
    delta_g, eta_bar, eta_o, evolve_pair, is_properly_nondisturbing, jpd, proper_nondisturbance_of,
    wjd, EtaBarOptions, DEFAULT_TOL,
};
use crate::model::{heisenberg, lift_system, MeasurementModel, Observable, QState};
use crate::random::{
    case_rng, haar_unitary, observable_with_spectrum, random_dichotomic, random_hermitian,
    random_observable, random_state, AuditRng,
};
use crate::scenarios::random_local_model;

/// Equality tolerance for identities checked by the audits.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Outcome of one audited property.
///
/// `worst` is the smallest slack for inequalities and the largest deviation
/// for identities; `failures` counts cases outside tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertySummary {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    /// Universal properties must never fail.
    pub universal: bool,
}

impl PropertySummary {
    fn new(name: &str, universal: bool, worst: f64) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            worst,
            universal,
        }
    }

    fn slack(&mut self, slack: f64, tol: f64) {
        self.cases += 1;
        self.worst = self.worst.min(slack);
        if slack < -tol {
            self.failures += 1;
        }
    }

    fn deviation(&mut self, deviation: f64, tol: f64) {
        self.cases += 1;
        self.worst = self.worst.max(deviation);
        if deviation > tol || deviation.is_nan() {
            self.failures += 1;
        }
    }

    fn boolean(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.worst += 1.0;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub n: usize,
    pub properties: Vec<PropertySummary>,
    /// Stored case witnessing a violation of the product form `εη ≥ ½|⟨[A,B]⟩|`.
    pub heisenberg_violation: InequalityRecord,
    pub all_passed: bool,
}

/// Random qubit system coupled to a random qubit probe.
pub fn random_qubit_model(rng: &mut AuditRng) -> Result<MeasurementModel> {
    random_model(&[2], 2, rng)
}

pub fn random_model(
    system_dims: &[usize],
    probe_dim: usize,
    rng: &mut AuditRng,
) -> Result<MeasurementModel> {
    let n: usize = system_dims.iter().product::<usize>() * probe_dim;
    let u = haar_unitary(n, rng);
    let xi = random_state(&[probe_dim], rng);
    let meter = random_observable(probe_dim, rng, "M");
    MeasurementModel::new(system_dims.to_vec(), probe_dim, xi, u, meter)
}

/// Robertson and the three-term universal relation on random qubit models.
pub fn audit_universality(seed: u64, n: usize) -> Result<(PropertySummary, PropertySummary)> {
    let mut rob = PropertySummary::new("robertson", true, f64::INFINITY);
    let mut universal = PropertySummary::new("universal_edr", true, f64::INFINITY);
    for k in 0..n {
        let mut rng = case_rng(seed, k as u64);
        let model = random_qubit_model(&mut rng)?;
        let a = random_observable(2, &mut rng, "A");
        let b = random_observable(2, &mut rng, "B");
        let psi = random_state(&[2], &mut rng);
        // Err means the relation failed by more than the tolerance.
        rob.slack(
            robertson(&a, &b, &psi).map_or(f64::NEG_INFINITY, |r| r.slack()),
            IDENTITY_TOL,
        );
        universal.slack(
            universal_edr(&model, &a, &b, &psi).map_or(f64::NEG_INFINITY, |r| r.slack()),
            IDENTITY_TOL,
        );
    }
    Ok((rob, universal))
}

/// The zero-noise state `(|0⟩ + i|1⟩)/√2` under the controlled-NOT σ_z measurement.
pub fn heisenberg_violation_case() -> Result<InequalityRecord> {
    let z = Observable::new(pauli::z(), "σz")?;
    let x = Observable::new(pauli::x(), "σx")?;
    let model = crate::model::projective_model(&z, &[2], 2)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = QState::new(vec![2], vec![c(h, 0.0), c(0.0, h)])?;
    heisenberg_product(&model, &z, &x, &psi)
}

/// One model/observable/state triple for the equivalence audit.
///
/// Cases cycle through a generic random interaction, a coupling controlled
/// by the eigenbasis of `B` (non-disturbing for every state), and an
/// interaction that fixes an eigenstate of `B` (non-disturbing for that state only).
pub fn nondisturbance_case(seed: u64, k: usize) -> Result<(MeasurementModel, Observable, QState)> {
    let mut rng = case_rng(seed, k as u64);
    let dim = 2 + k % 2;
    let probe = 2;
    let spectrum_unitary = haar_unitary(dim, &mut rng);
    let values: Vec<f64> = if k % 4 == 3 {
        // degenerate spectrum
        (0..dim).map(|i| if i == 0 { 1.0 } else { -1.0 }).collect()
    } else {
        (0..dim)
            .map(|i| i as f64 - 0.37 * i as f64 * i as f64)
            .collect()
    };
    let b = observable_with_spectrum(&spectrum_unitary, &values, "B");
    let xi = random_state(&[probe], &mut rng);
    let meter = random_observable(probe, &mut rng, "M");
    let n = dim * probe;
    match k % 3 {
        0 => {
            let u = haar_unitary(n, &mut rng);
            let psi = random_state(&[dim], &mut rng);
            Ok((
                MeasurementModel::new(vec![dim], probe, xi, u, meter)?,
                b,
                psi,
            ))
        }
        1 => {
            let mut u = ComplexMatrix::zeros(n, n);
            for p in b.spectral().projectors() {
                u = u.add(&p.kron(&haar_unitary(probe, &mut rng)))?;
            }
            let psi = random_state(&[dim], &mut rng);
            Ok((
                MeasurementModel::new(vec![dim], probe, xi, u, meter)?,
                b,
                psi,
            ))
        }
        _ => {
            let column: Vec<_> = (0..dim).map(|i| spectrum_unitary.get(i, 0)).collect();
            let fixed = ComplexMatrix::outer(&column, &column);
            let rest = ComplexMatrix::identity(dim).sub(&fixed)?;
            let u = fixed
                .kron(&ComplexMatrix::identity(probe))
                .add(&rest.kron(&haar_unitary(probe, &mut rng)))?;
            let psi = QState::normalized(vec![dim], column)?;
            Ok((
                MeasurementModel::new(vec![dim], probe, xi, u, meter)?,
                b,
                psi,
            ))
        }
    }
}

/// The JPD, WJD and projector-transfer conditions never disagree.
pub fn audit_flag_agreement(seed: u64, n: usize, tol: f64) -> Result<(PropertySummary, usize)> {
    let mut summary = PropertySummary::new("nondisturbance_flags_agree", true, 0.0);
    let mut nondisturbing = 0;
    for k in 0..n {
        let (model, b, psi) = nondisturbance_case(seed, k)?;
        let flags = is_properly_nondisturbing(&model, &b, &psi, tol)?;
        if flags.verdict {
            nondisturbing += 1;
        }
        summary.boolean(flags.flags_agree());
    }
    Ok((summary, nondisturbing))
}

/// Local-measurement identities on `|Φ⁺⟩`: `δ_G(μ₀) = 0`, `δ_G(μ_τ) = η(σ_x⁽²⁾)`,
/// and the triangle sandwich, for Haar-random local models.
pub fn audit_local_correlations(seed: u64, n: usize) -> Result<(PropertySummary, PropertySummary)> {
    let mut equality = PropertySummary::new("local_deviation_equality", true, 0.0);
    let mut sandwich = PropertySummary::new("local_deviation_sandwich", true, f64::INFINITY);
    let psi = QState::phi_plus();
    let x1 = Observable::on_subsystem(&pauli::x(), &[2, 2], 0, "σx1")?;
    let x2 = Observable::on_subsystem(&pauli::x(), &[2, 2], 1, "σx2")?;
    for k in 0..n {
        let model = random_local_model(&mut case_rng(seed, k as u64))?;
        let (d0, dt, eta) = correlation_deviations(&model, &x1, &x2, &psi)?;
        equality.deviation(d0.max((dt - eta).abs()), IDENTITY_TOL);
        sandwich.slack(sandwich_slack(d0, dt, eta), IDENTITY_TOL);
    }
    Ok((equality, sandwich))
}

/// Triangle sandwich `|δ_τ − δ_0| ≤ η ≤ δ_τ + δ_0` for random states and local observables.
pub fn audit_sandwich_general(seed: u64, n: usize) -> Result<PropertySummary> {
    let mut sandwich =
        PropertySummary::new("local_deviation_sandwich_general", true, f64::INFINITY);
    for k in 0..n {
        let mut rng = case_rng(seed ^ 0x5eed, k as u64);
        let model = random_local_model(&mut rng)?;
        let b1 = Observable::on_subsystem(&random_hermitian(2, &mut rng), &[2, 2], 0, "B1")?;
        let b2 = Observable::on_subsystem(&random_hermitian(2, &mut rng), &[2, 2], 1, "B2")?;
        let psi = random_state(&[2, 2], &mut rng);
        let (d0, dt, eta) = correlation_deviations(&model, &b1, &b2, &psi)?;
        sandwich.slack(sandwich_slack(d0, dt, eta), IDENTITY_TOL);
    }
    Ok(sandwich)
}

fn sandwich_slack(d0: f64, dt: f64, eta: f64) -> f64 {
    (eta - (dt - d0).abs()).min(dt + d0 - eta)
}

/// `(δ_G(μ₀), δ_G(μ_τ), η(B₂))` for the pair `(B₁, B₂)`.
pub fn correlation_deviations(
    model: &MeasurementModel,
    b1: &Observable,
    b2: &Observable,
    psi: &QState,
) -> Result<(f64, f64, f64)> {
    let state = model.initial_state(psi)?;
    let b1_0 = lift_system(b1, model)?;
    let b1_t = heisenberg(&b1_0, model)?;
    let (b2_0, b2_t) = evolve_pair(model, b2)?;
    let d0 = delta_g(&jpd(&b1_0, &b2_0, &state)?)?;
    let dt = delta_g(&jpd(&b1_t, &b2_t, &state)?)?;
    Ok((d0, dt, eta_o(model, b2, psi)?))
}

/// Locality of proper non-disturbance: a local model properly non-disturbing
/// to `B₂` is properly non-disturbing to `B₁ ⊗ B₂` and leaves the JPD of
/// `(B₁, B₂)` unchanged.
pub fn audit_locality(seed: u64, n: usize) -> Result<(PropertySummary, PropertySummary)> {
    let mut product = PropertySummary::new("locality_product_nondisturbing", true, 0.0);
    let mut preserved = PropertySummary::new("locality_jpd_preserved", true, 0.0);
    for k in 0..n {
        let mut rng = case_rng(seed ^ 0x10ca1, k as u64);
        let local_b2 = random_hermitian(2, &mut rng);
        let b2_local = Observable::new(local_b2.clone(), "B2")?;
        let mut w = ComplexMatrix::zeros(4, 4);
        for p in b2_local.spectral().projectors() {
            w = w.add(&p.kron(&haar_unitary(2, &mut rng)))?;
        }
        let meter = random_observable(2, &mut rng, "M");
        let xi = random_state(&[2], &mut rng);
        let model = MeasurementModel::local_to_last(vec![2, 2], xi, &w, meter)?;
        let b1_local = random_hermitian(2, &mut rng);
        let b1 = Observable::on_subsystem(&b1_local, &[2, 2], 0, "B1")?;
        let b2 = Observable::on_subsystem(&local_b2, &[2, 2], 1, "B2")?;
        let psi = random_state(&[2, 2], &mut rng);

        let hypothesis = is_properly_nondisturbing(&model, &b2, &psi, DEFAULT_TOL)?;
        let joint = Observable::new(b1_local.kron(&local_b2), "B1⊗B2")?;
        let flags = is_properly_nondisturbing(&model, &joint, &psi, DEFAULT_TOL)?;
        product.boolean(hypothesis.verdict && flags.verdict && flags.flags_agree());

        let state = model.initial_state(&psi)?;
        let b1_0 = lift_system(&b1, &model)?;
        let b1_t = heisenberg(&b1_0, &model)?;
        let (b2_0, b2_t) = evolve_pair(&model, &b2)?;
        let before = jpd(&b1_0, &b2_0, &state)?;
        let after = jpd(&b1_t, &b2_t, &state)?;
        let mut deviation = 0.0_f64;
        for &u in before.u_values() {
            for &v in before.v_values() {
                deviation = deviation.max((before.prob(u, v) - after.prob(u, v)).abs());
            }
        }
        preserved.deviation(deviation, IDENTITY_TOL);
    }
    Ok((product, preserved))
}

/// `η̄ ≥ η_O` on random qutrit models, and `η̄ = η_O` for dichotomic `B`.
pub fn audit_eta_bar(seed: u64, n: usize) -> Result<(PropertySummary, PropertySummary)> {
    let mut dominating = PropertySummary::new("eta_bar_dominating", true, f64::INFINITY);
    let mut conservation = PropertySummary::new("eta_bar_conservation", true, 0.0);
    for k in 0..n {
        let mut rng = case_rng(seed ^ 0xe7a, k as u64);
        let model = random_model(&[3], 2, &mut rng)?;
        let psi = random_state(&[3], &mut rng);
        let b = random_observable(3, &mut rng, "B");
        let bar = eta_bar(&model, &b, &psi, EtaBarOptions::default())?;
        dominating.slack(bar.value - eta_o(&model, &b, &psi)?, IDENTITY_TOL);

        let d = random_dichotomic(3, &mut rng, "B");
        let bar = eta_bar(&model, &d, &psi, EtaBarOptions::default())?;
        conservation.deviation((bar.value - eta_o(&model, &d, &psi)?).abs(), IDENTITY_TOL);
    }
    Ok((dominating, conservation))
}

/// `η_O² = Σ (u − v)² Re ν(u, v)` with `ν` the WJD of `(B(τ), B(0))`.
pub fn audit_wjd_identity(seed: u64, n: usize) -> Result<PropertySummary> {
    let mut summary = PropertySummary::new("wjd_eta_identity", true, 0.0);
    for k in 0..n {
        let mut rng = case_rng(seed ^ 0x3d, k as u64);
        let dim = 2 + k % 2;
        let model = random_model(&[dim], 2, &mut rng)?;
        let b = random_observable(dim, &mut rng, "B");
        let psi = random_state(&[dim], &mut rng);
        summary.deviation(wjd_identity_gap(&model, &b, &psi)?, IDENTITY_TOL);
    }
    Ok(summary)
}

pub fn wjd_identity_gap(model: &MeasurementModel, b: &Observable, psi: &QState) -> Result<f64> {
    let (b0, bt) = evolve_pair(model, b)?;
    let nu = wjd(&bt, &b0, &model.initial_state(psi)?)?;
    let mut sum = 0.0;
    for (i, &u) in nu.u_values().iter().enumerate() {
        for (j, &v) in nu.v_values().iter().enumerate() {
            sum += (u - v).powi(2) * nu.at(i, j).re;
        }
    }
    Ok((eta_o(model, b, psi)?.powi(2) - sum).abs())
}

/// Runs every audit with `n` cases each.
pub fn run_all(seed: u64, n: usize, tol: f64) -> Result<AuditReport> {
    let mut properties = Vec::new();
    let (rob, universal) = audit_universality(seed, n)?;
    properties.extend([rob, universal]);
    properties.push(audit_flag_agreement(seed, n, tol)?.0);
    let (eq, sw) = audit_local_correlations(seed, n)?;
    properties.extend([eq, sw]);
    properties.push(audit_sandwich_general(seed, n)?);
    let (prod, pres) = audit_locality(seed, n)?;
    properties.extend([prod, pres]);
    let (dom, cons) = audit_eta_bar(seed, n)?;
    properties.extend([dom, cons]);
    properties.push(audit_wjd_identity(seed, n)?);
    let all_passed = properties
        .iter()
        .filter(|p| p.universal)
        .all(PropertySummary::passed);
    Ok(AuditReport {
        seed,
        n,
        properties,
        heisenberg_violation: heisenberg_violation_case()?,
        all_passed,
    })
}

/// Classification flags for an arbitrary evolved pair; re-exported for tests
/// that construct `B(τ)` by hand.
pub fn flags_for_pair(bt: &Observable, b0: &Observable, state: &QState, tol: f64) -> Result<bool> {
    Ok(proper_nondisturbance_of(bt, b0, state, tol)?.flags_agree())
}
