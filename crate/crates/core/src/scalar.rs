//! Scalar abstraction: the real field the whole crate is generic over.
//!
//! Everything numeric in this crate is parameterized by a real scalar `T`
//! implementing [`Float`]; complex amplitudes are `Complex<T>`. The trait
//! bundles the `num-traits` surface with `nalgebra`'s `RealField` so the
//! dense linear algebra kernels work unchanged for `f32` and `f64`.

use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type for states, operators, and probabilities.
///
/// Implemented for `f32` and `f64`. The default tolerances used across the
/// crate assume `f64` resolution; `f32` users should pass explicit
/// tolerances where an operation takes one.
pub trait Float:
    num_traits::Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + nalgebra::RealField
    + std::iter::Sum
    + std::fmt::Display
    + std::fmt::LowerExp
    + Default
    + 'static
{
    /// Lift an `f64` constant into `T`.
    ///
    /// Panics on values that do not convert (never happens for the finite
    /// literals this crate uses).
    #[inline]
    fn from_f64_const(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 constant converts to scalar")
    }

    /// Lift a `usize` count into `T`.
    #[inline]
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("usize converts to scalar")
    }

    /// Diagnostic value for error messages, which are monomorphic over `f64`.
    #[inline]
    fn as_diag(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Float for f32 {}
impl Float for f64 {}
