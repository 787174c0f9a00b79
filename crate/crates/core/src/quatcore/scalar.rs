//! Numeric substrate shared by every algebraic type in the crate.
//!
//! Two backends exist: [`f64`] for sweeps and interactive work, and
//! [`Rational`] (arbitrary precision) for constructing curves from integer or
//! rational data without rounding.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Absolute tolerance used by float-mode predicates unless a call overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Field operations plus the few extra hooks the geometry code needs.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for the rational backend.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact conversion for the rational backend; `None` for non-finite input.
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;

    /// Zero test. Exact backends ignore `tol`.
    fn near_zero(&self, tol: f64) -> bool;

    /// Square root when it exists in the backend (perfect squares only when exact).
    fn sqrt_checked(&self) -> Option<Self>;

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_exact_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn near_zero(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }
    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator/denominator too large for a direct conversion
            let n = self.numer().bits() as i64;
            let d = self.denom().bits() as i64;
            let shift = (n - d) - 60;
            let scaled = if shift > 0 {
                self / BigRational::from_integer(BigInt::one() << shift as usize)
            } else {
                self * BigRational::from_integer(BigInt::one() << (-shift) as usize)
            };
            ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
        })
    }
    fn near_zero(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (&n * &n == *self.numer() && &d * &d == *self.denom()).then(|| BigRational::new(n, d))
    }
    fn abs_value(&self) -> Self {
        Signed::abs(self)
    }
}

/// Builds an exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(ratio(9, 16).sqrt_checked(), Some(ratio(3, 4)));
        assert_eq!(ratio(2, 1).sqrt_checked(), None);
        assert_eq!(ratio(-4, 1).sqrt_checked(), None);
    }

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let big = BigInt::from(3) << 2000usize;
        let r = BigRational::new(big.clone() + 1, big);
        assert!((Scalar::to_f64(&r) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn float_roundtrip_is_exact() {
        let v = 0.1_f64;
        let r = <Rational as Scalar>::from_f64(v).unwrap();
        assert_eq!(Scalar::to_f64(&r), v);
    }
}
