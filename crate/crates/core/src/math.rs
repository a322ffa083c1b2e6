//! Small scalar helpers shared across modules.
//!
//! `T` carries both the `num_traits::Float` and `nalgebra::RealField`
//! method sets, which overlap; these free functions pin one resolution so
//! call sites stay unambiguous.

use crate::scalar::Float;

#[inline]
pub(crate) fn fabs<T: Float>(x: T) -> T {
    num_traits::Float::abs(x)
}

#[inline]
pub(crate) fn fmax<T: Float>(a: T, b: T) -> T {
    num_traits::Float::max(a, b)
}

#[inline]
pub(crate) fn fsqrt<T: Float>(x: T) -> T {
    num_traits::Float::sqrt(x)
}

#[inline]
pub(crate) fn fln<T: Float>(x: T) -> T {
    num_traits::Float::ln(x)
}
