//! Scalar abstraction shared by the metric and statistics code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the numeric routines are generic over: `f32` or `f64`.
///
/// Tail probabilities far below `1e-38` are only meaningful with `f64`; the
/// log-space routines still return finite values for `f32`, just with `f32`
/// precision.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("constant representable in scalar type")
    }

    /// Conversion from a count.
    fn count(value: usize) -> Self {
        Self::from_usize(value).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
