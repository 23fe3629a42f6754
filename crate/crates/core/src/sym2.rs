//! Symmetric 2x2 matrices with closed-form spectral decompositions.
//!
//! Everything downstream (observability spectra, covariance maintenance,
//! Mahalanobis whitening) reduces to 2x2 symmetric eigenproblems, so they are
//! solved in closed form here instead of calling an iterative solver. For
//! `[[a, b], [b, c]]` the eigenvalues are
//!
//! ```text
//! lambda = (a + c)/2 +- sqrt((a - c)^2 + 4 b^2) / 2
//! ```
//!
//! where the discriminant is written as a sum of squares so it can never go
//! negative through rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::Scalar;

/// Symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym2<T> {
    pub a11: T,
    pub a12: T,
    pub a22: T,
}

/// Eigenvalue pair of a positive semidefinite [`Sym2`], ordered and clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPair<T> {
    pub lambda_min: T,
    pub lambda_max: T,
}

impl<T: Scalar> SpectralPair<T> {
    /// Smallest singular value of any matrix whose Gram matrix has these eigenvalues.
    pub fn sigma_min(&self) -> T {
        self.lambda_min.sqrt()
    }

    /// Largest singular value of any matrix whose Gram matrix has these eigenvalues.
    pub fn sigma_max(&self) -> T {
        self.lambda_max.sqrt()
    }
}

impl<T: Scalar> Sym2<T> {
    pub fn new(a11: T, a12: T, a22: T) -> Self {
        Self { a11, a12, a22 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::one())
    }

    pub fn diagonal(a11: T, a22: T) -> Self {
        Self::new(a11, T::zero(), a22)
    }

    /// Scaled identity `s * I`.
    pub fn scaled_identity(s: T) -> Self {
        Self::diagonal(s, s)
    }

    /// Rank-one outer product `v v^T`.
    pub fn outer(v: Point2<T>) -> Self {
        Self::new(v.x * v.x, v.x * v.y, v.y * v.y)
    }

    pub fn trace(&self) -> T {
        self.a11 + self.a22
    }

    pub fn det(&self) -> T {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// Eigenvalues in closed form, ordered `lambda_min <= lambda_max`.
    ///
    /// Intended for positive semidefinite input: a `lambda_min` that rounds
    /// slightly negative is clamped to zero. Use [`Sym2::eigen_signed`] when the
    /// sign matters.
    pub fn eigenvalues(&self) -> SpectralPair<T> {
        let (lo, hi) = self.eigen_signed();
        SpectralPair {
            lambda_min: lo.max(T::zero()),
            lambda_max: hi.max(T::zero()),
        }
    }

    /// Unclamped eigenvalues, ordered ascending.
    pub fn eigen_signed(&self) -> (T, T) {
        let half = T::cast(0.5);
        let mid = (self.a11 + self.a22) * half;
        let d = self.a11 - self.a22;
        let spread = (d * d + T::cast(4) * self.a12 * self.a12).sqrt() * half;
        (mid - spread, mid + spread)
    }

    /// Rotation angle and descending eigenvalues of `R(phi) diag(l1, l2) R(phi)^T`.
    ///
    /// `(cos phi, sin phi)` is an eigenvector for `l1`, the larger eigenvalue.
    fn principal_axes(&self) -> (T, T, T) {
        let phi = T::cast(0.5) * (T::cast(2) * self.a12).atan2(self.a11 - self.a22);
        let (lo, hi) = self.eigen_signed();
        (phi, hi, lo)
    }

    /// Rebuilds the matrix with every eigenvalue raised to at least `floor`.
    ///
    /// Keeps the eigenvectors, so a matrix that already satisfies the floor is
    /// reproduced up to rounding. Used to keep covariances positive definite.
    pub fn floor_eigenvalues(&self, floor: T) -> Self {
        let (lo, _) = self.eigen_signed();
        if lo >= floor {
            return *self;
        }
        let (phi, l1, l2) = self.principal_axes();
        Self::from_axes(phi, l1.max(floor), l2.max(floor))
    }

    fn from_axes(phi: T, l1: T, l2: T) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(
            l1 * c * c + l2 * s * s,
            (l1 - l2) * c * s,
            l1 * s * s + l2 * c * c,
        )
    }

    /// Inverse of a non-singular symmetric matrix.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if !det.is_finite() || det.abs() <= T::zero() {
            return Err(Error::SingularCovariance);
        }
        Ok(Self::new(self.a22 / det, -self.a12 / det, self.a11 / det))
    }

    /// Symmetric inverse square root `M^(-1/2)` of a positive definite matrix.
    ///
    /// The identity maps to the identity exactly, so whitening with a unit
    /// covariance is a no-op bit for bit.
    pub fn inv_sqrt(&self) -> Result<Self> {
        if *self == Self::identity() {
            return Ok(*self);
        }
        let (phi, l1, l2) = self.principal_axes();
        if !(l2 > T::zero()) || !l1.is_finite() {
            return Err(Error::SingularCovariance);
        }
        Ok(Self::from_axes(phi, l1.sqrt().recip(), l2.sqrt().recip()))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: Point2<T>) -> Point2<T> {
        Point2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a12 * v.x + self.a22 * v.y,
        )
    }

    /// Quadratic form `v^T M v`.
    pub fn quad_form(&self, v: Point2<T>) -> T {
        v.dot(self.mul_vec(v))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }
}

impl<T: Scalar> std::ops::Add for Sym2<T> {
    type Output = Sym2<T>;

    fn add(self, rhs: Sym2<T>) -> Sym2<T> {
        Sym2::new(self.a11 + rhs.a11, self.a12 + rhs.a12, self.a22 + rhs.a22)
    }
}

impl<T: Scalar> std::ops::AddAssign for Sym2<T> {
    fn add_assign(&mut self, rhs: Sym2<T>) {
        *self = *self + rhs;
    }
}
