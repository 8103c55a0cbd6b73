use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the estimators are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance used by the internal root finders: `tol`, but never
    /// tighter than a few ulps of `scale`.
    #[inline]
    fn tolerance(tol: f64, scale: Self) -> Self {
        Self::lit(tol).max(Self::lit(4.0) * Self::epsilon() * scale.abs())
    }
}

impl Real for f32 {}
impl Real for f64 {}
