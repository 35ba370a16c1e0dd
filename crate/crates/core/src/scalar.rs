use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar used by the dense and Pauli numerics.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync
{
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("finite scalar")
}

#[inline]
pub fn cre<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `i^k` as a complex number.
#[inline]
pub fn i_pow<T: Real>(k: u8) -> C<T> {
    match k & 3 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// Complex modulus.
#[inline]
pub fn cabs<T: Real>(c: C<T>) -> T {
    c.norm_sqr().sqrt()
}
