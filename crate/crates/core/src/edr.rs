//! Error–disturbance relations and the E91 security tradeoff.
//!
//! The Heisenberg product form `ε(A)η(B) ≥ ½|⟨[A,B]⟩|` is violable and is
//! reported, never raised. Robertson's relation and the universally valid
//! three-term form always hold; a violation beyond [`UNIVERSAL_TOL`] can
//! only come from a bug and is returned as [`Error::InternalConsistency`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, STRUCTURE_TOL};
use crate::measures::{delta_g, epsilon_o, eta_o, evolve_pair, jpd, sigma};
use crate::model::{check_dim, heisenberg, lift_system, MeasurementModel, Observable, QState};

/// Slack allowed on universally valid inequalities.
pub const UNIVERSAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≥ rhs`
    AtLeast,
    /// `lhs ≤ rhs`
    AtMost,
}

/// One evaluated inequality. `margin = lhs − rhs` regardless of direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub margin: f64,
}

impl InequalityRecord {
    fn new(name: &str, relation: Relation, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = lhs - rhs;
        let satisfied = match relation {
            Relation::AtLeast => margin >= -tol,
            Relation::AtMost => margin <= tol,
        };
        Self {
            name: name.to_string(),
            relation,
            lhs,
            rhs,
            satisfied,
            margin,
        }
    }

    /// Distance to violation; negative when violated.
    pub fn slack(&self) -> f64 {
        match self.relation {
            Relation::AtLeast => self.margin,
            Relation::AtMost => -self.margin,
        }
    }

    fn require(self) -> Result<Self> {
        if self.satisfied {
            Ok(self)
        } else {
            Err(Error::InternalConsistency(format!(
                "{} violated: lhs = {:.12}, rhs = {:.12}",
                self.name, self.lhs, self.rhs
            )))
        }
    }
}

/// `½|⟨ψ|[A,B]|ψ⟩|`.
pub fn commutator_bound(a: &Observable, b: &Observable, psi: &QState) -> Result<f64> {
    check_dim("observables", a.dim(), b.dim())?;
    check_dim("observable vs state", a.dim(), psi.dim())?;
    let comm = a.matrix().commutator(b.matrix())?;
    Ok(0.5 * comm.expectation(psi.amplitudes())?.norm())
}

/// `σ(A)σ(B) ≥ ½|⟨[A,B]⟩|`.
pub fn robertson(a: &Observable, b: &Observable, psi: &QState) -> Result<InequalityRecord> {
    let lhs = sigma(a, psi)? * sigma(b, psi)?;
    let rhs = commutator_bound(a, b, psi)?;
    InequalityRecord::new("robertson", Relation::AtLeast, lhs, rhs, UNIVERSAL_TOL).require()
}

/// `ε(A)η(B) ≥ ½|⟨[A,B]⟩|`; violations are expected and reported.
pub fn heisenberg_product(
    model: &MeasurementModel,
    a: &Observable,
    b: &Observable,
    psi: &QState,
) -> Result<InequalityRecord> {
    let lhs = epsilon_o(model, a, psi)? * eta_o(model, b, psi)?;
    let rhs = commutator_bound(a, b, psi)?;
    Ok(InequalityRecord::new(
        "heisenberg_product",
        Relation::AtLeast,
        lhs,
        rhs,
        UNIVERSAL_TOL,
    ))
}

/// `εη + εσ(B) + σ(A)η ≥ ½|⟨[A,B]⟩|`.
pub fn universal_edr(
    model: &MeasurementModel,
    a: &Observable,
    b: &Observable,
    psi: &QState,
) -> Result<InequalityRecord> {
    let eps = epsilon_o(model, a, psi)?;
    let eta = eta_o(model, b, psi)?;
    let lhs = eps * eta + eps * sigma(b, psi)? + sigma(a, psi)? * eta;
    let rhs = commutator_bound(a, b, psi)?;
    InequalityRecord::new("universal_edr", Relation::AtLeast, lhs, rhs, UNIVERSAL_TOL).require()
}

/// For a zero-error measurement of `A`: `η(B) ≥ |⟨[A,B]⟩| / (2σ(A))`.
pub fn zero_noise_bound(
    model: &MeasurementModel,
    a: &Observable,
    b: &Observable,
    psi: &QState,
) -> Result<InequalityRecord> {
    let eps = epsilon_o(model, a, psi)?;
    if eps > 1e-8 {
        return Err(Error::Precondition(format!(
            "measurement of A has nonzero error ε = {eps:.3e}"
        )));
    }
    let sigma_a = sigma(a, psi)?;
    if sigma_a <= 1e-8 {
        return Err(Error::Precondition(format!(
            "σ(A) = {sigma_a:.3e} is degenerate"
        )));
    }
    let lhs = eta_o(model, b, psi)?;
    let rhs = commutator_bound(a, b, psi)? / sigma_a;
    InequalityRecord::new(
        "zero_noise_bound",
        Relation::AtLeast,
        lhs,
        rhs,
        UNIVERSAL_TOL,
    )
    .require()
}

fn bell_observables() -> (Observable, Observable, Observable) {
    let dims = [2, 2];
    let z2 = Observable::on_subsystem(&pauli::z(), &dims, 1, "σz⁽²⁾").expect("qubit");
    let x1 = Observable::on_subsystem(&pauli::x(), &dims, 0, "σx⁽¹⁾").expect("qubit");
    let x2 = Observable::on_subsystem(&pauli::x(), &dims, 1, "σx⁽²⁾").expect("qubit");
    (z2, x1, x2)
}

fn check_bell_setting(model: &MeasurementModel, psi: &QState) -> Result<()> {
    if model.system_dims() != [2, 2] {
        return Err(Error::SettingMismatch(format!(
            "expected a two-qubit system, found dims {:?}",
            model.system_dims()
        )));
    }
    check_dim("system state", 4, psi.dim())?;
    let overlap = crate::linalg::inner(QState::phi_plus().amplitudes(), psi.amplitudes()).norm();
    if (overlap - 1.0).abs() > STRUCTURE_TOL {
        return Err(Error::SettingMismatch(format!(
            "state is not the Bell state |Φ⁺⟩ (|⟨Φ⁺|ψ⟩| = {overlap:.9})"
        )));
    }
    if !model.is_local_to_last() {
        return Err(Error::NonLocalModel);
    }
    Ok(())
}

/// `(ε(σ_z⁽²⁾)² − 2)² + (η(σ_x⁽²⁾)² − 2)² ≤ 4` for a local measurement of
/// the second qubit of `|Φ⁺⟩`.
pub fn branciard_tight(model: &MeasurementModel, psi: &QState) -> Result<InequalityRecord> {
    check_bell_setting(model, psi)?;
    let (z2, _, x2) = bell_observables();
    let eps = epsilon_o(model, &z2, psi)?;
    let eta = eta_o(model, &x2, psi)?;
    let lhs = (eps * eps - 2.0).powi(2) + (eta * eta - 2.0).powi(2);
    InequalityRecord::new("branciard_tight", Relation::AtMost, lhs, 4.0, UNIVERSAL_TOL).require()
}

/// Left-hand side of the tight relation from `ε` and `η`.
pub fn branciard_lhs(epsilon: f64, eta: f64) -> f64 {
    (epsilon * epsilon - 2.0).powi(2) + (eta * eta - 2.0).powi(2)
}

/// Eve's optimal key error at a given Alice–Bob error probability,
/// `½ − (¼ − (p − ½)²)^{1/2}` with the radicand floored at zero.
pub fn p_e_optimal(p_ab: f64) -> f64 {
    0.5 - (0.25 - (p_ab - 0.5).powi(2)).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E91Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub delta_g_tau: f64,
    pub p_ab: f64,
    pub p_e: f64,
    pub p_e_optimal: f64,
    /// `η(σ_x⁽²⁾)`
    pub eta_key: f64,
    /// `ε(σ_z⁽²⁾)`
    pub epsilon_eve: f64,
}

/// Eavesdropping analysis of a local measurement of the second qubit of `|Φ⁺⟩`.
pub fn e91_analyze(model: &MeasurementModel) -> Result<E91Report> {
    if model.system_dims() != [2, 2] {
        return Err(Error::SettingMismatch(format!(
            "expected a two-qubit system, found dims {:?}",
            model.system_dims()
        )));
    }
    if !model.is_local_to_last() {
        return Err(Error::NonLocalModel);
    }
    let psi = QState::phi_plus();
    let (z2, x1, x2) = bell_observables();
    let state = model.initial_state(&psi)?;
    let x1t = heisenberg(&lift_system(&x1, model)?, model)?;
    let (_, x2t) = evolve_pair(model, &x2)?;
    let mu_tau = jpd(&x1t, &x2t, &state)?;
    let delta_g_tau = delta_g(&mu_tau)?;
    let epsilon_eve = epsilon_o(model, &z2, &psi)?;
    let p_ab = delta_g_tau * delta_g_tau / 4.0;
    Ok(E91Report {
        theta: None,
        label: None,
        delta_g_tau,
        p_ab,
        p_e: epsilon_eve * epsilon_eve / 4.0,
        p_e_optimal: p_e_optimal(p_ab),
        eta_key: eta_o(model, &x2, &psi)?,
        epsilon_eve,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdrReport {
    pub epsilon: f64,
    pub eta: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    /// `½|⟨[A,B]⟩|`
    pub bound: f64,
    pub inequalities: Vec<InequalityRecord>,
}

/// Every applicable relation for `(model, A, B, ψ)`.
///
/// The zero-noise bound is included only when its precondition holds.
pub fn edr_report(
    model: &MeasurementModel,
    a: &Observable,
    b: &Observable,
    psi: &QState,
) -> Result<EdrReport> {
    let mut inequalities = vec![
        heisenberg_product(model, a, b, psi)?,
        robertson(a, b, psi)?,
        universal_edr(model, a, b, psi)?,
    ];
    match zero_noise_bound(model, a, b, psi) {
        Ok(r) => inequalities.push(r),
        Err(Error::Precondition(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(EdrReport {
        epsilon: epsilon_o(model, a, psi)?,
        eta: eta_o(model, b, psi)?,
        sigma_a: sigma(a, psi)?,
        sigma_b: sigma(b, psi)?,
        bound: commutator_bound(a, b, psi)?,
        inequalities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ComplexMatrix};
    use crate::model::projective_model;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn obs(m: ComplexMatrix, label: &str) -> Observable {
        Observable::new(m, label).unwrap()
    }

    fn plus() -> QState {
        QState::new(vec![2], vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    fn plus_i() -> QState {
        QState::new(vec![2], vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap()
    }

    fn cnot_model() -> MeasurementModel {
        projective_model(&obs(pauli::z(), "σz"), &[2], 2).unwrap()
    }

    #[test]
    fn robertson_examples() {
        let z = obs(pauli::z(), "z");
        let x = obs(pauli::x(), "x");
        let r = robertson(&z, &x, &plus()).unwrap();
        assert!(r.rhs.abs() < 1e-15 && r.satisfied);
        let r = robertson(&z, &z, &plus()).unwrap();
        assert_eq!(r.rhs, 0.0);
        let r = robertson(&z, &x, &plus_i()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert!(r.margin.abs() < 1e-12);
    }

    #[test]
    fn heisenberg_product_examples() {
        let m = cnot_model();
        let z = obs(pauli::z(), "z");
        let x = obs(pauli::x(), "x");
        let r = heisenberg_product(&m, &z, &x, &QState::zero()).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12 && r.satisfied);
        let r = heisenberg_product(&m, &z, &x, &plus_i()).unwrap();
        assert!(r.lhs.abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!(!r.satisfied);
    }

    #[test]
    fn universal_edr_examples() {
        let m = cnot_model();
        let z = obs(pauli::z(), "z");
        let x = obs(pauli::x(), "x");
        let r = universal_edr(&m, &z, &x, &plus_i()).unwrap();
        assert!((r.lhs - SQRT_2).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        let r = universal_edr(&m, &x, &x, &plus_i()).unwrap();
        assert!(r.rhs.abs() < 1e-15);
    }

    #[test]
    fn zero_noise_examples() {
        let m = cnot_model();
        let z = obs(pauli::z(), "z");
        let x = obs(pauli::x(), "x");
        let r = zero_noise_bound(&m, &z, &x, &plus_i()).unwrap();
        assert!((r.lhs - SQRT_2).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        let r = zero_noise_bound(&m, &z, &z, &plus_i()).unwrap();
        assert!(r.rhs.abs() < 1e-15);
        assert!(matches!(
            zero_noise_bound(&m, &z, &x, &QState::zero()),
            Err(Error::Precondition(_))
        ));
        // σ_x is not measured without error by the σ_z coupling
        assert!(matches!(
            zero_noise_bound(&m, &x, &z, &plus_i()),
            Err(Error::Precondition(_))
        ));
    }

    fn sigma_theta_model(theta: f64) -> MeasurementModel {
        let a = Observable::on_subsystem(&pauli::theta(theta), &[2, 2], 1, "σθ").unwrap();
        projective_model(&a, &[2, 2], 2).unwrap()
    }

    #[test]
    fn branciard_examples() {
        let r = branciard_tight(&sigma_theta_model(0.0), &QState::phi_plus()).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-12);
        let r = branciard_tight(&sigma_theta_model(0.9), &QState::phi_plus()).unwrap();
        assert!(r.lhs < 4.0);
        let none = MeasurementModel::no_interaction(vec![2, 2], obs(pauli::z(), "M")).unwrap();
        let r = branciard_tight(&none, &QState::phi_plus()).unwrap();
        assert!((r.lhs - 4.0).abs() < 1e-12);
        let wrong = QState::basis(vec![2, 2], 0).unwrap();
        assert!(matches!(
            branciard_tight(&none, &wrong),
            Err(Error::SettingMismatch(_))
        ));
    }

    #[test]
    fn e91_examples() {
        let r = e91_analyze(&sigma_theta_model(0.0)).unwrap();
        assert!((r.p_ab - 0.5).abs() < 1e-12);
        assert!(r.p_e.abs() < 1e-12);
        assert!((r.eta_key - SQRT_2).abs() < 1e-12);
        let none = MeasurementModel::no_interaction(vec![2, 2], obs(pauli::z(), "M")).unwrap();
        let r = e91_analyze(&none).unwrap();
        assert!(r.p_ab.abs() < 1e-12);
        assert!((r.p_e_optimal - 0.5).abs() < 1e-12);
        let r = e91_analyze(&sigma_theta_model(FRAC_PI_4)).unwrap();
        assert!((r.p_ab - 0.25).abs() < 1e-12);
        assert!((r.p_e_optimal - (0.5 - 3f64.sqrt() / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn e91_rejects_nonlocal() {
        let a = Observable::on_subsystem(&pauli::z(), &[2, 2], 0, "σz1").unwrap();
        let m = projective_model(&a, &[2, 2], 2).unwrap();
        assert_eq!(e91_analyze(&m).unwrap_err(), Error::NonLocalModel);
    }

    #[test]
    fn p_e_optimal_curve() {
        assert_eq!(p_e_optimal(0.0), 0.5);
        assert_eq!(p_e_optimal(0.5), 0.0);
        // radicand floored just outside the domain
        assert!(p_e_optimal(1.0 + 1e-12).is_finite());
    }

    #[test]
    fn report_contains_zero_noise_bound_only_when_applicable() {
        let m = cnot_model();
        let z = obs(pauli::z(), "z");
        let x = obs(pauli::x(), "x");
        let r = edr_report(&m, &z, &x, &plus_i()).unwrap();
        assert_eq!(r.inequalities.len(), 4);
        let r = edr_report(&m, &z, &x, &QState::zero()).unwrap();
        assert_eq!(r.inequalities.len(), 3);
        assert!((r.eta - SQRT_2).abs() < 1e-12);
    }
}
