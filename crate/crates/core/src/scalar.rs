//! Scalar field used by every construction in the crate.
//!
//! [`Rational`] (arbitrary precision, exact) is the reference scalar: every
//! identity the constructions rely on holds with literal equality there.
//! [`Approx`] is an `f64` wrapper whose comparisons use a process-wide
//! tolerance, for quick runs where exactness is not needed.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational number, always kept in lowest terms
/// with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Default comparison tolerance of [`Approx`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Sets the global comparison tolerance used by [`Approx`].
pub fn set_tolerance(tol: f64) {
    TOLERANCE_BITS.store(tol.abs().to_bits(), AtomicOrdering::Relaxed);
}

/// Current global comparison tolerance used by [`Approx`].
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

/// An ordered field the measure algebra can run over.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;

    /// `numer / denom`; panics when `denom == 0`.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// -1, 0 or 1.
    fn signum(&self) -> Self {
        if self.is_positive() {
            Self::one()
        } else if self.is_negative() {
            -Self::one()
        } else {
            Self::zero()
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn one() -> Self {
        <Rational as num_traits::One>::one()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// `f64` with tolerance-aware comparisons: two values are equal when they
/// differ by at most [`tolerance()`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Approx(pub f64);

impl PartialEq for Approx {
    fn eq(&self, other: &Self) -> bool {
        (self.0 - other.0).abs() <= tolerance()
    }
}

impl PartialOrd for Approx {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self == other {
            Some(Ordering::Equal)
        } else {
            self.0.partial_cmp(&other.0)
        }
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! approx_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Approx {
            type Output = Approx;
            fn $method(self, rhs: Approx) -> Approx {
                Approx(self.0 $op rhs.0)
            }
        }
    };
}

approx_binop!(Add, add, +);
approx_binop!(Sub, sub, -);
approx_binop!(Mul, mul, *);
approx_binop!(Div, div, /);

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;

    fn zero() -> Self {
        Approx(0.0)
    }

    fn one() -> Self {
        Approx(1.0)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Approx(numer as f64 / denom as f64)
    }

    fn from_rational(r: &Rational) -> Self {
        Approx(ToPrimitive::to_f64(r).unwrap_or(f64::NAN))
    }

    fn to_f64(&self) -> f64 {
        self.0
    }
}

/// Sum of an iterator of scalars (zero when empty).
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

pub fn min<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

pub fn max<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

/// Clamps `x` into `[lo, hi]`.
pub fn clamp<S: Scalar>(x: S, lo: S, hi: S) -> S {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Shorthand for an exact `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerance_bits() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), DEFAULT_TOLERANCE);
    }

    #[test]
    fn rational_is_normalized() {
        let r = ratio(6, -4);
        assert_eq!(*r.numer(), BigInt::from(-3));
        assert_eq!(*r.denom(), BigInt::from(2));
        assert_eq!(Scalar::signum(&r), ratio(-1, 1));
    }

    #[test]
    fn approx_compares_within_tolerance() {
        assert_eq!(Approx(0.1 + 0.2), Approx(0.3));
        assert!(Approx(1e-12).is_zero());
        assert!(Approx(1e-3) > Approx(0.0));
        assert_eq!(Approx::from_ratio(1, 4).0, 0.25);
    }
}
