//! Scalar abstraction shared by the geometry and metrics code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the pose algebra and metrics are generic over.
///
/// Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used to accept a quaternion as unit-norm.
    fn unit_tolerance() -> Self;

    /// Threshold below which a resultant, determinant or spread is treated as zero.
    fn degenerate_tolerance() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f64 {
    fn unit_tolerance() -> Self {
        1e-9
    }

    fn degenerate_tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    // 1e-9 is below f32 resolution; a few hundred ulps around 1.0 instead.
    fn unit_tolerance() -> Self {
        1e-4
    }

    fn degenerate_tolerance() -> Self {
        1e-6
    }
}

/// Arithmetic mean of a non-empty iterator. Returns `None` when empty.
pub(crate) fn mean<T: Real>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut sum = T::zero();
    let mut count = 0usize;
    for v in values {
        sum = sum + v;
        count += 1;
    }
    if count == 0 {
        None
    } else {
        Some(sum / T::from_usize(count)?)
    }
}
