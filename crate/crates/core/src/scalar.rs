use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerics are written against: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert an `f64` literal into this scalar.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Convert an integer count into this scalar.
    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    /// Tolerance floor for this precision: `max(requested, 64 * epsilon)`.
    #[inline]
    fn tol_floor(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(requested).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Reduce `x` modulo `period` into `(-period/2, period/2]`.
pub fn wrap_centered<T: Scalar>(x: T, period: T) -> T {
    let half = period / T::lit(2.0);
    let mut r = x - (x / period).round() * period;
    if r <= -half {
        r = r + period;
    } else if r > half {
        r = r - period;
    }
    r
}
