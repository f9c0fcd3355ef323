//! Scalar abstraction for registers and observations.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type a program can compute with.
///
/// Everything the interpreter needs beyond [`Float`] is a lossless way to
/// compare values bit-for-bit and a conversion from the renderer's `f64`
/// intensities.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Divisors with a smaller magnitude leave the target register unchanged.
    fn protected_divisor_epsilon() -> Self;

    fn from_f64_lossy(v: f64) -> Self;

    fn bits(self) -> u64;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn protected_divisor_epsilon() -> Self {
                1e-10
            }

            #[inline]
            fn from_f64_lossy(v: f64) -> Self {
                v as $t
            }

            #[inline]
            fn bits(self) -> u64 {
                self.to_bits() as u64
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
