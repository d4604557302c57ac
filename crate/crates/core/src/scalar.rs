//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by regression, standardization and the
/// floating-point simplex.
pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range")
    }
}

impl Real for f32 {}
impl Real for f64 {}
