//! Matrix scalar types.
//!
//! Matrices are generic over their value type so that single- and
//! double-precision products can be built from the same code paths.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Floating-point value type of a sparse matrix (`f32` or `f64`).
pub trait Scalar:
    num_traits::Float
    + AddAssign
    + SubAssign
    + MulAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Short name used in reports and CLI flags.
    const NAME: &'static str;

    /// Storage size of one value, for memory accounting.
    const VALUE_BYTES: u64;

    /// Relative tolerance when comparing against a reference computed in a
    /// different summation order.
    const REL_TOL: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
    const VALUE_BYTES: u64 = 4;
    const REL_TOL: f64 = 1e-5;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
    const VALUE_BYTES: u64 = 8;
    const REL_TOL: f64 = 1e-12;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

/// Bytes of one stored matrix entry: a 32-bit column index plus one value.
///
/// Row pointers are deliberately excluded; all memory figures count entries
/// only, so sizes stay comparable across allocation strategies.
pub fn entry_bytes<S: Scalar>() -> u64 {
    4 + S::VALUE_BYTES
}

/// `|x - y| <= floor + rel * max(|x|, |y|)` with `floor = rel`.
///
/// The absolute floor keeps entries that cancel to round-off from failing a
/// purely relative test.
pub fn approx_eq<S: Scalar>(x: S, y: S, rel: f64) -> bool {
    let (x, y) = (x.to_f64(), y.to_f64());
    if x == y {
        return true;
    }
    if !x.is_finite() || !y.is_finite() {
        return false;
    }
    (x - y).abs() <= rel + rel * x.abs().max(y.abs())
}
