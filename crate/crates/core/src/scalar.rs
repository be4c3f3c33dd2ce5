//! Scalar abstraction for the chain builders and the analytics.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point type usable as a transition probability.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert a count (or any small exact value) into the scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("value representable in scalar type")
    }

    fn count(value: usize) -> Self {
        Self::from_usize(value).expect("count representable in scalar type")
    }

    /// Machine epsilon.
    fn machine_epsilon() -> Self {
        Self::default_epsilon()
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for row sums of a built transition matrix.
    fn row_tolerance() -> Self;

    /// Per-dimension tolerance on `||A F - I||` after a dense solve, and on
    /// the stationary residual `||pi P - pi||`.
    fn solve_tolerance() -> Self;

    /// Largest accepted drift of `sum(b^t F)` from 1 before normalizing.
    fn drift_tolerance() -> Self;
}

impl Scalar for f64 {
    fn row_tolerance() -> Self {
        1e-12
    }

    fn solve_tolerance() -> Self {
        1e-9
    }

    fn drift_tolerance() -> Self {
        1e-6
    }
}

impl Scalar for f32 {
    fn row_tolerance() -> Self {
        1e-5
    }

    fn solve_tolerance() -> Self {
        1e-3
    }

    fn drift_tolerance() -> Self {
        1e-4
    }
}
