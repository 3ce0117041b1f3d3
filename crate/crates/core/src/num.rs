//! Scalar abstraction shared by the geometry, collision and dynamics kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the simulation kernels are generic over.
///
/// Implemented for `f32` and `f64`. Scene files and benchmark exports are
/// always written through `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    if a > -pi && a <= pi {
        return a;
    }
    let mut r = a % two_pi;
    if r <= -pi {
        r = r + two_pi;
    } else if r > pi {
        r = r - two_pi;
    }
    r
}
