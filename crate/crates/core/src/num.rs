//! Scalar abstraction for the model arithmetic.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the model computes over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + Debug + Display + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("constant must be representable in the scalar type")
    }

    /// Converts a count into the scalar type.
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("count must be representable in the scalar type")
    }

    /// Widens to `f64` for diagnostics; NaN if the value does not convert.
    fn widen(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum<T> + Debug + Display + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_convert_for_both_widths() {
        assert_eq!(f64::c(0.5), 0.5);
        assert_eq!(f32::c(0.5), 0.5f32);
        assert_eq!(f64::of_usize(7), 7.0);
        assert_eq!(0.25f32.widen(), 0.25);
    }
}
