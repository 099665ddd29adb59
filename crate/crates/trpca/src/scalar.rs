//! Scalar abstraction: the whole stack is generic over `f32`/`f64`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar type for tensors and solvers.
///
/// `RealField` supplies arithmetic and elementary functions and makes
/// `Complex<Self>` usable in per-slice factorizations; `FftNum` admits the
/// scalar to FFT plans; the num-traits conversions move tolerances and
/// reporting values across the type boundary.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + FftNum + Copy {
    /// Embeds an `f64` constant (tolerance, literal) into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }

    /// Widens to `f64` for reports and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
