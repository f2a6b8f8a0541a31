//! Numeric abstraction for vertex attributes and geometric predicates.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for attribute storage: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used by parsers and generators.
    fn of(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    /// Lossy conversion to `f64`, used by serializers.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::of(0.5)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
}

/// Linear interpolation `a + t (b - a)`, written so that `t = 0.5` is symmetric
/// in its endpoints.
#[inline]
pub fn lerp<T: Scalar>(a: T, b: T, t: T) -> T {
    if t == T::half() {
        (a + b) * T::half()
    } else {
        a + (b - a) * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_is_symmetric() {
        let (a, b) = (0.1f64, 0.7f64);
        assert_eq!(lerp(a, b, 0.5), lerp(b, a, 0.5));
        assert_eq!(lerp(1.0f32, 3.0, 0.25), 1.5);
    }

    #[test]
    fn conversions_round_trip() {
        assert_eq!(<f32 as Scalar>::of(0.5).as_f64(), 0.5);
        assert_eq!(<f64 as Scalar>::half(), 0.5);
    }
}
