//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating point scalar: `f32` or `f64`.
///
/// `rustfft::FftNum` pulls in `num_traits::Signed`, which shares method names
/// with `Float` (`abs`, `signum`). Generic code calls those through
/// [`fabs`] or `Float::abs` to stay unambiguous.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Display
    + Debug
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, panicking only for values the type cannot hold.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("integer representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance floor: `base` for f64, widened to a multiple of machine
    /// epsilon for narrower types.
    fn tol(base: f64) -> Self {
        let floor = 64.0 * <Self as Float>::epsilon().to_f64_lossy();
        Self::lit(base.max(floor))
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub fn fabs<T: Real>(x: T) -> T {
    Float::abs(x)
}

#[inline]
pub fn fmax<T: Real>(a: T, b: T) -> T {
    Float::max(a, b)
}

#[inline]
pub fn fmin<T: Real>(a: T, b: T) -> T {
    Float::min(a, b)
}

pub fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k))
}
