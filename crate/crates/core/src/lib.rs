//! Observability-driven sensor selection for range-only target tracking.
//!
//! A network of static range-only sensors tracks moving targets in the plane.
//! How well a sensor subset can observe a target is scored through the inverse
//! condition number of the local observability matrix, for which this crate
//! computes a control-independent lower bound together with a family of
//! alternative information measures (trace, log-determinant, rank, negated
//! trace of the inverse).
//!
//! On top of the measures sit three assignment solvers:
//!
//! * disjoint sensor pairs per target via [`assignment::greedy_unique_pairs`],
//!   greedy with a 1/3 approximation guarantee,
//! * distinct (but not disjoint) pairs via exact maximum-weight bipartite
//!   matching in [`assignment::relaxed_pair_assignment`],
//! * arbitrary sensor bundles per target via [`assignment::greedy_general`],
//!   greedy on marginal gains with a 1/2 guarantee for submodular measures.
//!
//! The [`sim`] module runs EKF tracking scenarios that replay these selection
//! strategies against circular, waypoint and adversarial target motion, and is
//! what the accompanying command line tool drives.
//!
//! Numeric code is generic over the [`scalar::Scalar`] floating point type;
//! the `*F` aliases below fix `f64`, which is what the simulator and CLI use.

// Validation guards are written `!(x > 0)` on purpose: NaN must fail them,
// and the un-negated `x <= 0` would let it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod config;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod measures;
pub mod observability;
pub mod scalar;
pub mod sim;
pub mod sym2;

pub use error::{Error, Result};

/// Shared numeric constants.
pub mod consts {
    /// Distance below which a sensor counts as colliding with the target (m).
    /// Relative bearings, and with them observability rows, degenerate there.
    pub const COLLISION_TOL: f64 = 1e-9;
    /// Default spectral regularisation for the log-det / rank / trace-inverse
    /// measures; also the rank threshold.
    pub const DEFAULT_EPSILON: f64 = 1e-9;
    /// Slack allowed when hunting for monotonicity or submodularity violations.
    pub const SET_FUNCTION_TOL: f64 = 1e-9;
    /// Smallest eigenvalue kept in an EKF covariance after an update.
    pub const COV_JITTER_FLOOR: f64 = 1e-12;
    /// Default variance of the squared-range measurement noise (m^4).
    pub const DEFAULT_NOISE_VAR: f64 = 0.01;
    /// Initial EKF covariance scale: `Sigma_0 = 10 I`.
    pub const INIT_COV_SCALE: f64 = 10.0;
}

/// `f64` aliases used by the simulator and the CLI.
pub type Point2F = geometry::Point2<f64>;
pub type ControlInputF = geometry::ControlInput<f64>;
pub type SensorPoseF = geometry::SensorPose<f64>;
pub type TargetBeliefF = geometry::TargetBelief<f64>;
pub type PairPolarF = geometry::PairPolar<f64>;
pub type Sym2F = sym2::Sym2<f64>;
pub type SpectralPairF = sym2::SpectralPair<f64>;
pub type ObservabilityBlockF = observability::ObservabilityBlock<f64>;
pub type MeasureContextF = measures::MeasureContext<f64>;
pub type WeightMatrixF = matching::WeightMatrix<f64>;
pub type MatchingF = matching::Matching<f64>;
pub type PairAssignmentF = assignment::PairAssignment<f64>;
pub type GeneralAssignmentF = assignment::GeneralAssignment<f64>;
