//! Scalar abstraction shared by every algorithm in the crate.
//!
//! All weights, gains and thresholds are carried by a type implementing
//! [`Scalar`]. The exact path uses [`BigRational`]; `f64` and `f32` are
//! available for quick floating-point runs where exact equalities are not
//! needed.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// An ordered field element usable as a weight.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// Converts an exact rational into this scalar type (lossy for floats).
    fn from_rational(value: &BigRational) -> Self;

    /// Best-effort conversion to `f64`, used for report approximations and
    /// random coin flips.
    fn approx_f64(&self) -> f64;

    fn from_usize(value: usize) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(value)))
    }

    /// Total comparison; incomparable values (NaN) compare equal.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl Scalar for BigRational {
    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn approx_f64(&self) -> f64 {
        match self.to_f64() {
            Some(v) if v.is_finite() => v,
            // Huge numerators/denominators overflow the direct conversion.
            _ => {
                let n = self.numer().to_f64().unwrap_or(f64::INFINITY);
                let d = self.denom().to_f64().unwrap_or(f64::INFINITY);
                if n.is_finite() && d.is_finite() {
                    n / d
                } else {
                    let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(900);
                    let n = (self.numer().abs() >> shift).to_f64().unwrap_or(0.0);
                    let d = (self.denom() >> shift).to_f64().unwrap_or(1.0);
                    let v = if d == 0.0 { f64::INFINITY } else { n / d };
                    if self.is_negative() {
                        -v
                    } else {
                        v
                    }
                }
            }
        }
    }
}

impl Scalar for f64 {
    fn from_rational(value: &BigRational) -> Self {
        BigRational::approx_f64(value)
    }

    fn approx_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(value: &BigRational) -> Self {
        BigRational::approx_f64(value) as f32
    }

    fn approx_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Returns the larger of two scalars (the first on ties).
pub fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

/// Sum of an iterator of scalars.
pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Smallest integer `m >= 0` with `base^m >= target`, by repeated
/// multiplication. Requires `base > 1`.
pub fn ceil_log<S: Scalar>(base: &S, target: &S) -> u64 {
    assert!(*base > S::one(), "logarithm base must exceed 1");
    let mut power = S::one();
    let mut m = 0u64;
    while power < *target {
        power = power * base.clone();
        m += 1;
    }
    m
}
