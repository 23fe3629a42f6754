//! Conditioning of the range-only observability matrix.
//!
//! For sensors at `p_i` and a target at `o` with planar control `u`, the local
//! observability matrix stacks the relative rows `(o - p_i)^T` with a final row
//! `u^T`. Its inverse condition number `sigma_min / sigma_max` in `[0, 1]` is
//! the conditioning figure of merit used everywhere else in this crate: 1 means
//! isotropic information, 0 means an unobservable direction.
//!
//! Since the control is unknown at decision time, selection works with a control
//! independent lower bound obtained by splitting off the `u u^T` term:
//!
//! ```text
//! sigma_min(O) / sqrt(sigma_max(O)^2 + u_max^2)  <=  inverse condition
//! ```
//!
//! where `O` holds only the relative rows. The bound is tight at `u = 0` and is
//! identically zero for a single sensor, whose one-row block always leaves an
//! unobservable direction.
//!
//! For exactly two sensors the bound has a closed polar form in the distances
//! `d_i`, `d_j = alpha * d_i` and the bearing separation `theta_ji`; see
//! [`pair_lower_bound_polar`].

use crate::consts;
use crate::error::{Error, Result};
use crate::geometry::{ControlInput, Point2, SensorPose};
use crate::scalar::Scalar;
use crate::sym2::{SpectralPair, Sym2};

/// Relative-row block of the observability matrix for one sensor subset.
///
/// Row `k` is `target - position(sensor_k)`, in input order. Rows are non-zero
/// by construction: building a block fails with [`Error::Collision`] when a
/// sensor sits on the target.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityBlock<T> {
    rows: Vec<Point2<T>>,
    sensor_ids: Vec<u32>,
}

impl<T: Scalar> ObservabilityBlock<T> {
    /// Builds the block of relative rows `target - p_i` for a sensor subset.
    pub fn build(sensors: &[SensorPose<T>], target: Point2<T>) -> Result<Self> {
        if sensors.is_empty() {
            return Err(Error::EmptySensorSet);
        }
        if !target.is_finite() {
            return Err(Error::Config("target position must be finite".into()));
        }
        let tol = T::cast(consts::COLLISION_TOL);
        let mut rows = Vec::with_capacity(sensors.len());
        let mut sensor_ids = Vec::with_capacity(sensors.len());
        for s in sensors {
            if sensor_ids.contains(&s.id) {
                return Err(Error::DuplicateSensor(s.id));
            }
            let row = target - s.position;
            if row.norm() <= tol {
                return Err(Error::Collision(s.id));
            }
            rows.push(row);
            sensor_ids.push(s.id);
        }
        Ok(Self { rows, sensor_ids })
    }

    pub fn rows(&self) -> &[Point2<T>] {
        &self.rows
    }

    pub fn sensor_ids(&self) -> &[u32] {
        &self.sensor_ids
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Gram matrix `O^T O` of the relative rows, the symmetric observability matrix.
    pub fn gram(&self) -> Sym2<T> {
        gram_of(&self.rows)
    }

    /// Eigenvalues of the Gram matrix.
    ///
    /// `lambda_max` comes from the quadratic formula with the discriminant in
    /// sum-of-squares form; `lambda_min` is recovered as `det / lambda_max` with
    /// the determinant accumulated over row cross products (Cauchy-Binet), which
    /// stays accurate even when the block is nearly rank one.
    pub fn spectral(&self) -> SpectralPair<T> {
        spectral_of_rows(&self.rows, None)
    }

    /// Control-independent lower bound on the inverse condition number.
    ///
    /// Returns `sqrt(lambda_min / (lambda_max + u_max^2))`, which is exactly 0
    /// for a single-sensor block and equals [`Self::inverse_condition_exact`]
    /// at zero control.
    pub fn lower_bound(&self, u_max: T) -> T {
        let eig = self.spectral();
        let den = eig.lambda_max + u_max * u_max;
        if !(den > T::zero()) {
            return T::zero();
        }
        (eig.lambda_min / den).sqrt()
    }

    /// Inverse condition number of the full matrix with control row `u` appended.
    pub fn inverse_condition_exact(&self, u: ControlInput<T>) -> T {
        let eig = spectral_of_rows(&self.rows, Some(u));
        if !(eig.lambda_max > T::zero()) {
            return T::zero();
        }
        (eig.lambda_min / eig.lambda_max).sqrt()
    }
}

fn gram_of<T: Scalar>(rows: &[Point2<T>]) -> Sym2<T> {
    let mut m = Sym2::zero();
    for r in rows {
        m += Sym2::outer(*r);
    }
    m
}

pub(crate) fn spectral_of_rows<T: Scalar>(
    rows: &[Point2<T>],
    extra: Option<Point2<T>>,
) -> SpectralPair<T> {
    let mut m = gram_of(rows);
    // det(O^T O) = sum over row pairs of cross(r_i, r_j)^2. Unlike
    // a11 * a22 - a12^2 this has no cancellation, so tiny lambda_min values
    // keep full relative accuracy.
    let mut det = T::zero();
    for (i, ri) in rows.iter().enumerate() {
        for rj in rows.iter().skip(i + 1) {
            let c = ri.cross(*rj);
            det += c * c;
        }
    }
    if let Some(u) = extra {
        m += Sym2::outer(u);
        for r in rows {
            let c = r.cross(u);
            det += c * c;
        }
    }
    let lambda_max = m.eigenvalues().lambda_max;
    let lambda_min = if lambda_max > T::zero() {
        (det / lambda_max).min(lambda_max)
    } else {
        T::zero()
    };
    SpectralPair {
        lambda_min,
        lambda_max,
    }
}

/// Closed-form two-sensor lower bound in polar coordinates.
///
/// Arguments are the distance `d_io` from sensor `i` to the target, the ratio
/// `alpha = d_jo / d_io`, the bearing separation `theta_ji` and the control
/// bound `u_max`. With `S = sqrt(1 + alpha^4 + 2 alpha^2 cos(2 theta))` the
/// bound is
///
/// ```text
/// sqrt( (1 + alpha^2 - S) / (1 + alpha^2 + S + 2 u_max^2 / d_io^2) )
/// ```
///
/// The numerator is evaluated as `4 alpha^2 sin^2(theta) / (1 + alpha^2 + S)`,
/// the algebraically identical form without subtractive cancellation, and is
/// taken as exactly zero whenever `cos(2 theta)` rounds to one: at bearing
/// separations of 0 or pi the two rows are parallel and the bound vanishes.
///
/// Maximised at `alpha = 1`, `theta = +-pi/2`, where it equals
/// `sqrt(1 / (1 + u_max^2 / d_io^2))`.
pub fn pair_lower_bound_polar<T: Scalar>(d_io: T, alpha: T, theta_ji: T, u_max: T) -> T {
    debug_assert!(d_io > T::zero(), "sensor i must not sit on the target");
    debug_assert!(alpha >= T::zero(), "distance ratio is non-negative");
    let one = T::one();
    let two = T::cast(2);
    let a2 = alpha * alpha;
    let cos2t = (two * theta_ji).cos();
    if cos2t == one {
        return T::zero();
    }
    let radicand = (one + a2 * a2 + two * a2 * cos2t).max(T::zero());
    let s = radicand.sqrt();
    let sin_t = theta_ji.sin();
    let num = T::cast(4) * a2 * sin_t * sin_t / (one + a2 + s);
    let den = one + a2 + s + two * u_max * u_max / (d_io * d_io);
    (num / den).sqrt()
}
