//! Floating-point scalar abstraction for the numerical kernels.
//!
//! All geometry and flow code is generic over [`Real`]; concrete aliases for
//! the `f64` instantiation live at the crate root.

use ndarray::LinalgScalar;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar type the kernels run on: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + LinalgScalar
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant converts to Real")
    }

    /// Lower into `f64` (used for reporting only).
    fn f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
