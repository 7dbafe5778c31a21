//! Scalar abstraction shared by every numerical module.
//!
//! Everything in this crate is written against [`Real`], which is satisfied
//! by `f32` and `f64`. The tolerances quoted throughout the docs are the ones
//! used with `f64`.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point scalar: nalgebra's `RealField` plus num-traits
/// conversions.
pub trait Real: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug {}

impl<T> Real for T where T: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Machine epsilon of `T`.
#[inline]
pub fn eps<T: Real>() -> T {
    T::default_epsilon()
}
