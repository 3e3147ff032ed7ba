//! Coefficient traits.
//!
//! Everything algebraic in this crate (polynomials, exponential sums, the
//! parameterization, generator evaluation, Jacobians) is written against
//! [`Scalar`] (a commutative ring with integer constants) or [`Field`]. The
//! exact instantiation is [`Rational`]; `f64`/`f32` are supported for quick
//! floating-point experiments.

use std::fmt::Debug;
use std::ops::{Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Commutative ring element usable as a coefficient.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_int(n: i64) -> Self;

    /// `self * n` for a small integer `n`.
    fn times(&self, n: i64) -> Self {
        self.clone() * Self::from_int(n)
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

/// A [`Scalar`] with exact (or floating) division by nonzero elements.
pub trait Field: Scalar + Div<Output = Self> {}

impl<T: Scalar + Div<Output = T>> Field for T {}

impl Scalar for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }
}

/// `x⁴ + 3y² − 4xt`, the quartic behind every Hirota generator.
pub fn hirota_quartic<C: Scalar>(x: &C, y: &C, t: &C) -> C {
    let x2 = x.clone() * x.clone();
    x2.clone() * x2 + (y.clone() * y.clone()).times(3) - (x.clone() * t.clone()).times(4)
}

/// Gradient of [`hirota_quartic`]: `(4x³ − 4t, 6y, −4x)`.
pub fn hirota_quartic_gradient<C: Scalar>(x: &C, y: &C, t: &C) -> [C; 3] {
    let x3 = x.clone() * x.clone() * x.clone();
    [x3.times(4) - t.times(4), y.times(6), x.times(-4)]
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"` or `"n/d"` (optional leading sign, decimal digits only).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::input(format!("not an exact rational: {s:?}"));
    let is_int = |t: &str| {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    if !is_int(num) || !is_int(den) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::input(format!("zero denominator: {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `"num/den"` form (lowest terms, positive denominator, always a slash).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}
