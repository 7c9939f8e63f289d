//! Arithmetic shared by the double-precision and exact-rational code paths.

use core::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A field with an ordering and a comparison tolerance.
///
/// `eps` is zero for exact types, so `is_positive` is a true sign test there.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug {
    fn eps() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_f64_exact(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    #[inline]
    fn is_positive_tol(&self) -> bool {
        *self > Self::eps()
    }

    #[inline]
    fn is_negative_tol(&self) -> bool {
        *self < -Self::eps()
    }
}

impl Scalar for f64 {
    #[inline]
    fn eps() -> Self {
        1e-12
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64_exact(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn eps() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Every finite double is a dyadic rational; this recovers it exactly.
    fn from_f64_exact(x: f64) -> Self {
        BigRational::from_f64(x).expect("finite input")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact rational `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    <BigRational as Scalar>::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_conversion_keeps_dyadics() {
        assert_eq!(BigRational::from_f64_exact(0.75), rational(3, 4));
        assert_ne!(BigRational::from_f64_exact(0.1), rational(1, 10));
        assert!(!rational(0, 1).is_positive_tol());
        assert!(rational(1, 1_000_000_000).is_positive_tol());
        assert!(!1e-13f64.is_positive_tol());
    }
}
