use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Scalar type for all physical/internal coordinates and weights.
///
/// Everything the crate computes is expressible with ordinary float
/// operations plus a handful of constants, so `f32` and `f64` both
/// qualify. The blanket set of supertraits keeps call sites free of
/// one-off bounds.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossless where possible; used for constants and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Conversion used by serialization paths and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }

    fn of_i64(x: i64) -> Self {
        Self::from_i64(x).expect("i64 converts to any Real")
    }

    /// Euclidean remainder, `x.rem_e(m)` in `[0, m)` for `m > 0`.
    fn rem_e(self, m: Self) -> Self {
        let r = self - (self / m).floor() * m;
        if r >= m {
            r - m
        } else {
            r
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
