//! Error, disturbance and joint-distribution analysis of indirect quantum
//! measurement models on finite-dimensional systems.

pub mod audit;
pub mod edr;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod random;
pub mod scenarios;

pub use edr::{E91Report, EdrReport, InequalityRecord, Relation};
pub use error::{Error, Result};
pub use linalg::{eig_hermitian, ComplexMatrix, SpectralDecomposition};
pub use measures::{
    DistributionKind, EtaBar, EtaBarOptions, JointDistribution, MultiDistribution,
    ProperNonDisturbance, DEFAULT_TOL,
};
pub use model::{MeasurementModel, ModelFile, Observable, QState};
pub use num_complex::Complex64;
pub use scenarios::{ScenarioResult, SweepRow};
