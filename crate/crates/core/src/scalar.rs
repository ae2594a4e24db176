//! Coefficient rings for q-series.
//!
//! [`Scalar`] is implemented for exact types ([`BigInt`], [`BigRational`]),
//! checked fixed-width integers (`i64`, `i128`), and floats (`f32`, `f64`).
//! Fixed-width integers panic on overflow rather than wrapping.

use std::fmt::Debug;
use std::ops::{AddAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_bigint(v: &BigInt) -> Self;

    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self);

    fn mul_i64(&self, k: i64) -> Self;

    /// Exact multiplication by a rational, `None` if the product is not
    /// representable in this ring.
    fn scale(&self, r: &BigRational) -> Option<Self>;

    /// The value as an integer, `None` unless it is integral.
    fn to_bigint(&self) -> Option<BigInt>;
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn mul_i64(&self, k: i64) -> Self {
        self * k
    }

    fn scale(&self, r: &BigRational) -> Option<Self> {
        let (q, rem) = (self * r.numer()).div_rem(r.denom());
        rem.is_zero().then_some(q)
    }

    fn to_bigint(&self) -> Option<BigInt> {
        Some(self.clone())
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_integer() && b.is_integer() && self.is_integer() {
            let sum = self.numer() + a.numer() * b.numer();
            *self = BigRational::from_integer(sum);
        } else {
            *self += a * b;
        }
    }

    fn mul_i64(&self, k: i64) -> Self {
        self * BigRational::from_integer(BigInt::from(k))
    }

    fn scale(&self, r: &BigRational) -> Option<Self> {
        Some(self * r)
    }

    fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().clone())
    }
}

macro_rules! impl_scalar_int {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                <$t>::try_from(v).expect("coefficient overflow")
            }

            fn from_bigint(v: &BigInt) -> Self {
                <$t as FromPrimitive>::from_i128(v.to_i128().expect("coefficient overflow"))
                    .expect("coefficient overflow")
            }

            fn add_product(&mut self, a: &Self, b: &Self) {
                *self = a
                    .checked_mul(*b)
                    .and_then(|p| self.checked_add(p))
                    .expect("coefficient overflow");
            }

            fn mul_i64(&self, k: i64) -> Self {
                self.checked_mul(<$t>::try_from(k).expect("coefficient overflow"))
                    .expect("coefficient overflow")
            }

            fn scale(&self, r: &BigRational) -> Option<Self> {
                let exact = BigInt::from(*self).scale(r)?;
                Some(<$t as Scalar>::from_bigint(&exact))
            }

            fn to_bigint(&self) -> Option<BigInt> {
                Some(BigInt::from(*self))
            }
        }
    )*};
}

impl_scalar_int!(i64, i128);

macro_rules! impl_scalar_float {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn from_bigint(v: &BigInt) -> Self {
                v.to_f64().unwrap_or(f64::NAN) as $t
            }

            fn add_product(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }

            fn mul_i64(&self, k: i64) -> Self {
                self * k as $t
            }

            fn scale(&self, r: &BigRational) -> Option<Self> {
                let r = r.numer().to_f64()? / r.denom().to_f64()?;
                Some(*self * r as $t)
            }

            fn to_bigint(&self) -> Option<BigInt> {
                (self.is_finite() && self.fract() == 0.0)
                    .then(|| BigInt::from_f64(*self as f64))
                    .flatten()
            }
        }
    )*};
}

impl_scalar_float!(f32, f64);

/// Sign of an exact integer as -1, 0 or 1.
pub fn sign_of(v: &BigInt) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// The rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
