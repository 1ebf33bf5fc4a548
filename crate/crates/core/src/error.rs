use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (‖A − A†‖ = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("interaction is not unitary (‖U†U − I‖ = {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("state is not normalized (‖ψ‖ = {norm})")]
    NotNormalized { norm: f64 },

    #[error("observables do not commute in the state (max ‖[P^X(u), P^Y(v)]Ψ‖ = {defect:.3e}); no joint probability distribution exists")]
    NotCommutingInState { defect: f64 },

    #[error(
        "δ_G is only defined on a joint probability distribution, not on a weak joint distribution"
    )]
    WjdNotClassical,

    #[error("conditioning on v = {value} which has zero marginal probability")]
    ZeroMarginal { value: f64 },

    #[error(
        "probe dimension {probe_dim} is smaller than the {needed} distinct eigenvalues to record"
    )]
    ProbeTooSmall { needed: usize, probe_dim: usize },

    #[error("measurement model is not local to the second subsystem")]
    NonLocalModel,

    #[error("setting mismatch: {0}")]
    SettingMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}
