//! Integer scalar abstraction for the exact linear algebra.
//!
//! Everything in [`crate::lattice`] and [`crate::splice`] is written against
//! [`Scalar`], so the same code runs on machine integers (`i64`, `i128`) for
//! quick experiments and on [`num_bigint::BigInt`] for the canonical
//! unbounded-precision path.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub trait Scalar:
    Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn of(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("i64 fits every scalar type")
    }

    /// Lossless conversion to the canonical big integer.
    fn to_big(&self) -> BigInt;

    /// Conversion from a big integer; `None` when it does not fit.
    fn from_big(v: &BigInt) -> Option<Self>;
}

impl Scalar for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl Scalar for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
}

impl Scalar for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd<T: Scalar>(a: &T, b: &T) -> (T, T, T) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Non-negative gcd of a sequence; zero for the empty sequence.
pub fn gcd_all<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values
        .into_iter()
        .fold(T::zero(), |acc, v| acc.gcd(v))
}
