//! Scalar abstraction so the whole engine runs at `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by the simulator and the calibration math.
///
/// Everything in this crate is generic over `Scalar`; the crate root exposes
/// `f64` aliases for the common case.
pub trait Scalar:
    Float + FromPrimitive + Sum<Self> + Debug + Display + FromStr + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` constant into `T`, panicking only on out-of-range values
/// that cannot occur for the constants used in this crate.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}
