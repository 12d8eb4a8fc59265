use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Absolute tolerance on `Σλ = 1` for a valid channel.
    fn channel_tol() -> Self;

    /// Magnitude below which a signed comparison is treated as zero.
    fn zero_tol() -> Self;

    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to every Real")
    }
}

impl Real for f64 {
    fn channel_tol() -> Self {
        1e-12
    }
    fn zero_tol() -> Self {
        1e-13
    }
}

impl Real for f32 {
    fn channel_tol() -> Self {
        1e-5
    }
    fn zero_tol() -> Self {
        1e-6
    }
}
