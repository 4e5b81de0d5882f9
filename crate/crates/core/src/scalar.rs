//! Scalar abstraction for the mathematical kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the kernel is generic over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for constants and tolerances.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// Conversion from a count; counts in this crate stay far below
    /// 2^24, so the conversion is exact even for `f32`.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + AddAssign + Sum + Debug + Display + Send + Sync + 'static
{
}
