use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the dynamics run on: f32 or f64.
///
/// Everything continuous in the crate (activities, thresholds, margins,
/// affine conjugacies) is generic over this trait; symbols and graph data
/// stay exact integers regardless of the scalar.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion used when sampling: samplers draw f64 from the
    /// seeded stream and narrow, so the random stream is identical for
    /// every scalar type.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    fn from_count(c: usize) -> Self {
        Self::from_usize(c).expect("small count converts to any scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
