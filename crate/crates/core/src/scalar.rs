//! Scalar abstraction so the geometry and solver code runs on f32 or f64.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, NumCast};

/// Floating point scalar used by every numeric routine in this crate.
///
/// Implemented for `f32` and `f64`. The simulator and CLI work with the
/// `f64` aliases exported from the crate root.
pub trait Scalar:
    Float + FromPrimitive + NumAssignOps + Sum + PartialOrd + Copy + Default + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Converts a literal, panicking only on values a float cannot hold.
    fn cast<T: NumCast>(value: T) -> Self {
        NumCast::from(value).expect("literal representable as scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
