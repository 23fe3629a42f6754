//! Set functions scoring a sensor subset against one target belief.
//!
//! All measures work on the symmetric observability matrix `M = O^T O` of the
//! subset's relative rows. [`MeasureKind::PairLowerBound`] is the conditioning
//! bound from [`crate::observability`]; the others are the classic information
//! surrogates:
//!
//! * `Trace`: `tr(M)`, modular in the sensor set,
//! * `LogDet`: `ln det(M + eps I)`, monotone submodular,
//! * `Rank`: eigenvalues of `M` above `eps`, monotone submodular,
//! * `TraceInverse`: `-tr((M + eps I)^-1)`, sign flipped so that bigger is
//!   better. Monotone increasing but *not* submodular: a row that covers a
//!   previously weak direction can be worth more to a grown set than to a
//!   subset, and [`check_submodular_monotone`] finds such violations readily.
//!
//! The conditioning bound is deliberately *not* submodular or monotone; see the
//! counter-example regressions in the tests. [`check_submodular_monotone`]
//! samples nested subsets to hunt for violations of either property.
//!
//! With [`DistanceMode::Mahalanobis`] the relative rows are whitened by
//! `Sigma^(-1/2)` of the target covariance, so uncertain directions count for
//! less. A unit covariance reproduces the Euclidean evaluation bit for bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::consts;
use crate::error::{Error, Result};
use crate::geometry::{Point2, SensorPose, TargetBelief};
use crate::observability::spectral_of_rows;
use crate::scalar::Scalar;

/// Which set function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    PairLowerBound,
    Trace,
    LogDet,
    Rank,
    TraceInverse,
}

/// How relative rows are measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    #[default]
    Euclidean,
    /// Whiten rows by the inverse square root of the target covariance.
    Mahalanobis,
}

/// Target belief plus evaluation settings shared by all measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureContext<T> {
    pub target: TargetBelief<T>,
    /// Spectral regularisation and rank threshold, `> 0`.
    pub epsilon: T,
    pub distance_mode: DistanceMode,
}

impl<T: Scalar> MeasureContext<T> {
    pub fn new(target: TargetBelief<T>) -> Self {
        Self {
            target,
            epsilon: T::cast(consts::DEFAULT_EPSILON),
            distance_mode: DistanceMode::Euclidean,
        }
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_distance_mode(mut self, mode: DistanceMode) -> Self {
        self.distance_mode = mode;
        self
    }
}

/// Relative rows for the subset under the context's distance mode.
///
/// Collision and duplicate checks use the raw Euclidean offsets; whitening is
/// applied afterwards.
fn relative_rows<T: Scalar>(
    sensors: &[SensorPose<T>],
    ctx: &MeasureContext<T>,
) -> Result<Vec<Point2<T>>> {
    let tol = T::cast(consts::COLLISION_TOL);
    let whitener = match ctx.distance_mode {
        DistanceMode::Euclidean => None,
        DistanceMode::Mahalanobis => Some(ctx.target.covariance.inv_sqrt()?),
    };
    let mut rows = Vec::with_capacity(sensors.len());
    let mut seen = Vec::with_capacity(sensors.len());
    for s in sensors {
        if seen.contains(&s.id) {
            return Err(Error::DuplicateSensor(s.id));
        }
        seen.push(s.id);
        let row = ctx.target.mean - s.position;
        if row.norm() <= tol {
            return Err(Error::Collision(s.id));
        }
        rows.push(match whitener {
            Some(w) => w.mul_vec(row),
            None => row,
        });
    }
    Ok(rows)
}

/// Evaluates one measure on a sensor subset. The subset may be empty, in which
/// case the regularised empty matrix is scored (zero for the conditioning
/// bound, trace and rank).
pub fn evaluate<T: Scalar>(
    kind: MeasureKind,
    sensors: &[SensorPose<T>],
    ctx: &MeasureContext<T>,
) -> Result<T> {
    let rows = relative_rows(sensors, ctx)?;
    let eps = ctx.epsilon;
    // Spectrum comes from the rows, not the assembled Gram matrix: the
    // cross-product determinant keeps lambda_min accurate where the Gram's
    // a11 * a22 - a12^2 would cancel catastrophically, and every spectral
    // measure below inherits that accuracy.
    let eig = spectral_of_rows(&rows, None);
    Ok(match kind {
        MeasureKind::PairLowerBound => {
            let u = ctx.target.u_max;
            let den = eig.lambda_max + u * u;
            if den > T::zero() {
                (eig.lambda_min / den).sqrt()
            } else {
                T::zero()
            }
        }
        MeasureKind::Trace => rows.iter().fold(T::zero(), |acc, r| acc + r.norm_sq()),
        MeasureKind::LogDet => ((eig.lambda_min + eps) * (eig.lambda_max + eps)).ln(),
        MeasureKind::Rank => {
            let mut rank = 0;
            if eig.lambda_max > eps {
                rank += 1;
            }
            if eig.lambda_min > eps {
                rank += 1;
            }
            T::cast(rank)
        }
        MeasureKind::TraceInverse => {
            -((eig.lambda_min + eps).recip() + (eig.lambda_max + eps).recip())
        }
    })
}

/// Gain of adding `extra` to `base`: `f(base + extra) - f(base)`.
pub fn marginal_gain<T: Scalar>(
    kind: MeasureKind,
    base: &[SensorPose<T>],
    extra: &SensorPose<T>,
    ctx: &MeasureContext<T>,
) -> Result<T> {
    if base.iter().any(|s| s.id == extra.id) {
        return Err(Error::DuplicateSensor(extra.id));
    }
    let before = evaluate(kind, base, ctx)?;
    let mut grown = base.to_vec();
    grown.push(*extra);
    let after = evaluate(kind, &grown, ctx)?;
    Ok(after - before)
}

/// One sampled monotonicity violation: `f(set + extra) < f(set) - tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation<T> {
    pub set: Vec<u32>,
    pub extra: u32,
    pub value_before: T,
    pub value_after: T,
}

/// One sampled submodularity violation: adding `extra` helps the superset more.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityViolation<T> {
    pub base: Vec<u32>,
    pub superset: Vec<u32>,
    pub extra: u32,
    pub gain_base: T,
    pub gain_superset: T,
}

/// Outcome of [`check_submodular_monotone`].
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunctionReport<T> {
    pub trials: usize,
    pub monotonicity: Vec<MonotonicityViolation<T>>,
    pub submodularity: Vec<SubmodularityViolation<T>>,
}

impl<T> SetFunctionReport<T> {
    pub fn is_clean(&self) -> bool {
        self.monotonicity.is_empty() && self.submodularity.is_empty()
    }
}

/// Randomly samples nested subsets `A <= B` of the universe and an outside
/// sensor `s`, and records every violation of monotonicity
/// (`f(X + s) >= f(X) - tol`) or submodularity (gain at `A` >= gain at `B`
/// `- tol`) at tolerance [`consts::SET_FUNCTION_TOL`].
///
/// Takes the RNG by value reference so callers control seeding and replay.
pub fn check_submodular_monotone<T: Scalar, R: Rng>(
    kind: MeasureKind,
    universe: &[SensorPose<T>],
    ctx: &MeasureContext<T>,
    trials: usize,
    rng: &mut R,
) -> Result<SetFunctionReport<T>> {
    let tol = T::cast(consts::SET_FUNCTION_TOL);
    let mut report = SetFunctionReport {
        trials,
        monotonicity: Vec::new(),
        submodularity: Vec::new(),
    };
    if universe.is_empty() {
        return Ok(report);
    }
    let ids = |set: &[SensorPose<T>]| set.iter().map(|s| s.id).collect::<Vec<_>>();
    for _ in 0..trials {
        let extra_idx = rng.gen_range(0..universe.len());
        let extra = universe[extra_idx];
        let mut superset = Vec::new();
        for (i, s) in universe.iter().enumerate() {
            if i != extra_idx && rng.gen::<bool>() {
                superset.push(*s);
            }
        }
        let base: Vec<_> = superset
            .iter()
            .copied()
            .filter(|_| rng.gen::<bool>())
            .collect();

        let f_base = evaluate(kind, &base, ctx)?;
        let gain_base = marginal_gain(kind, &base, &extra, ctx)?;
        let f_superset = evaluate(kind, &superset, ctx)?;
        let gain_superset = marginal_gain(kind, &superset, &extra, ctx)?;

        if gain_base < -tol {
            report.monotonicity.push(MonotonicityViolation {
                set: ids(&base),
                extra: extra.id,
                value_before: f_base,
                value_after: f_base + gain_base,
            });
        }
        if gain_superset < -tol {
            report.monotonicity.push(MonotonicityViolation {
                set: ids(&superset),
                extra: extra.id,
                value_before: f_superset,
                value_after: f_superset + gain_superset,
            });
        }
        if gain_base < gain_superset - tol {
            report.submodularity.push(SubmodularityViolation {
                base: ids(&base),
                superset: ids(&superset),
                extra: extra.id,
                gain_base,
                gain_superset,
            });
        }
    }
    Ok(report)
}
