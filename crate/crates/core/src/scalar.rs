//! Scalar traits the numeric modules are generic over.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::{Integer, Roots};
use num_traits::{Float, FloatConst, FromPrimitive, Signed, ToPrimitive};

/// Integer type usable as the coefficient ring of exact surds.
pub trait ExactInt:
    Integer + Roots + Signed + Clone + Debug + Display + Hash + ToPrimitive + FromPrimitive
{
}

impl<T> ExactInt for T where
    T: Integer + Roots + Signed + Clone + Debug + Display + Hash + ToPrimitive + FromPrimitive
{
}

/// Floating point type used by the numerical frame code: f32 or f64.
pub trait RealScalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from an f64 constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }
}

impl RealScalar for f32 {}
impl RealScalar for f64 {}
