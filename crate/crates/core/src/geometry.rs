//! Planar points, sensor poses, target beliefs and polar pair coordinates.

use serde::{Deserialize, Serialize};

use crate::consts;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sym2::Sym2;

/// Point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

/// Planar control input applied by a target, bounded by `u_max` at use sites.
pub type ControlInput<T> = Point2<T>;

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    pub fn dot(self, rhs: Self) -> T {
        self.x * rhs.x + self.y * rhs.y
    }

    /// Planar cross product `x1 y2 - y1 x2`.
    pub fn cross(self, rhs: Self) -> T {
        self.x * rhs.y - self.y * rhs.x
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> std::ops::Add for Point2<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> std::ops::Sub for Point2<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Static range-only sensor with a unique id.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorPose<T> {
    pub id: u32,
    pub position: Point2<T>,
}

impl<T: Scalar> SensorPose<T> {
    pub fn new(id: u32, x: T, y: T) -> Self {
        Self {
            id,
            position: Point2::new(x, y),
        }
    }
}

/// Current belief about one target: estimated position, covariance and speed bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetBelief<T> {
    pub id: u32,
    pub mean: Point2<T>,
    pub covariance: Sym2<T>,
    /// Largest control magnitude the target can apply, `>= 0`.
    pub u_max: T,
}

impl<T: Scalar> TargetBelief<T> {
    pub fn new(id: u32, mean: Point2<T>, covariance: Sym2<T>, u_max: T) -> Self {
        Self {
            id,
            mean,
            covariance,
            u_max,
        }
    }

    /// Belief with unit covariance, enough for purely geometric evaluations.
    pub fn at(id: u32, mean: Point2<T>, u_max: T) -> Self {
        Self::new(id, mean, Sym2::identity(), u_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || !self.covariance.is_finite() || !self.u_max.is_finite() {
            return Err(Error::Config(format!("target {}: non-finite field", self.id)));
        }
        if self.u_max < T::zero() {
            return Err(Error::Config(format!("target {}: u_max must be >= 0", self.id)));
        }
        let (lo, _) = self.covariance.eigen_signed();
        if !(lo > T::zero()) {
            return Err(Error::Config(format!(
                "target {}: covariance must be positive definite",
                self.id
            )));
        }
        Ok(())
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Scalar>(angle: T) -> T {
    let pi = T::cast(std::f64::consts::PI);
    let two_pi = T::cast(std::f64::consts::TAU);
    let mut w = angle % two_pi;
    if w <= -pi {
        w += two_pi;
    } else if w > pi {
        w -= two_pi;
    }
    w
}

/// Polar description of a sensor pair relative to a target: distances
/// `d_i`, `d_j` and the bearing separation `theta_ji` in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPolar<T> {
    pub d_i: T,
    pub d_j: T,
    pub theta_ji: T,
}

impl<T: Scalar> PairPolar<T> {
    /// Distance ratio `d_j / d_i`.
    pub fn alpha(&self) -> T {
        self.d_j / self.d_i
    }
}

/// Converts a sensor pair and target position into [`PairPolar`] coordinates.
///
/// Errors with [`Error::Collision`] when either sensor is within the collision
/// tolerance of the target, where bearings stop being defined.
pub fn pair_polar<T: Scalar>(
    sensor_i: &SensorPose<T>,
    sensor_j: &SensorPose<T>,
    target: Point2<T>,
) -> Result<PairPolar<T>> {
    let tol = T::cast(consts::COLLISION_TOL);
    let ri = sensor_i.position - target;
    let rj = sensor_j.position - target;
    let d_i = ri.norm();
    let d_j = rj.norm();
    if d_i <= tol {
        return Err(Error::Collision(sensor_i.id));
    }
    if d_j <= tol {
        return Err(Error::Collision(sensor_j.id));
    }
    let theta_ji = wrap_angle(rj.y.atan2(rj.x) - ri.y.atan2(ri.x));
    Ok(PairPolar { d_i, d_j, theta_ji })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn wrap_covers_boundaries() {
        assert_abs_diff_eq!(wrap_angle(PI), PI, epsilon = 0.0);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(1.5 * PI), -0.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-1.5 * PI), 0.5 * PI, epsilon = 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn polar_of_reference_pair() {
        // Sensors at the origin and (sqrt(3), 3), target at (sqrt(3), 1).
        let s1 = SensorPose::new(1, 0.0, 0.0);
        let s3 = SensorPose::new(3, 3f64.sqrt(), 3.0);
        let p = pair_polar(&s1, &s3, Point2::new(3f64.sqrt(), 1.0)).unwrap();
        assert_abs_diff_eq!(p.d_i, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.d_j, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.theta_ji, -2.0 * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.alpha(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn polar_is_antisymmetric_in_argument_order() {
        let a = SensorPose::new(1, -4.0, 2.0);
        let b = SensorPose::new(2, 3.0, -1.0);
        let o = Point2::new(0.5, 0.5);
        let ab = pair_polar(&a, &b, o).unwrap();
        let ba = pair_polar(&b, &a, o).unwrap();
        assert_abs_diff_eq!(ab.theta_ji, -ba.theta_ji, epsilon = 1e-12);
        assert_abs_diff_eq!(ab.d_i, ba.d_j, epsilon = 0.0);
    }

    #[test]
    fn collision_reports_offending_sensor() {
        let s1 = SensorPose::new(7, 1.0, 1.0);
        let s2 = SensorPose::new(8, 5.0, 5.0);
        let err = pair_polar(&s1, &s2, Point2::new(1.0, 1.0)).unwrap_err();
        assert_eq!(err, Error::Collision(7));
    }
}
