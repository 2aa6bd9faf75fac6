//! Generic floating-point scalar abstraction and physical constants.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

/// Scalar type the numerical core is generic over (`f32` or `f64`).
pub trait Real:
    RealField + FromPrimitive + ToPrimitive + SampleUniform + Copy + Default
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permeability mu_0 (H/m).
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_061_435_917_3e-6;

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}

/// Imaginary unit in the working precision.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `radius * exp(j * angle)` without requiring `num_traits::Float` on `T`.
#[inline]
pub fn polar<T: Real>(radius: T, angle: T) -> Complex<T> {
    let (s, c) = angle.sin_cos();
    Complex::new(radius * c, radius * s)
}

/// Wraps an angle into `[0, 2*pi)`.
#[inline]
pub fn wrap_angle<T: Real>(x: T) -> T {
    let tp = T::two_pi();
    let wrapped = x - tp * (x / tp).floor();
    // floor rounding can land exactly on 2*pi for tiny negative inputs
    if wrapped >= tp {
        wrapped - tp
    } else {
        wrapped
    }
}
