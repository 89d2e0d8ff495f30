//! Floating point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the discretization is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every finite `f64` maps to some value of
    /// both supported types, so this never fails for finite input.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// `self^e` for `self ≥ 0`. Exponents that are multiples of `1/4` with
    /// magnitude at most 16 go through `powi` and square roots, which is
    /// several times faster than `powf` and at least as accurate.
    fn pow_real(self, e: Self) -> Self {
        let four = e * Self::lit(4.0);
        if four != four.round() || e.abs() > Self::lit(16.0) {
            return self.powf(e);
        }
        let quarters = four.abs().to_i32().unwrap_or(0);
        let mut v = self.powi(quarters / 4);
        match quarters % 4 {
            1 => v = v * self.sqrt().sqrt(),
            2 => v = v * self.sqrt(),
            3 => {
                let h = self.sqrt();
                v = v * h * h.sqrt();
            }
            _ => {}
        }
        if e < Self::zero() {
            Self::one() / v
        } else {
            v
        }
    }

    /// Lossy conversion used for diagnostics and error messages.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
