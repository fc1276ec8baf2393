//! Field value types.
//!
//! Everything theorem-level runs on exact rationals. The float mode exists for
//! the transcendental kink formulas only; a run never mixes the two.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

pub type Rational = BigRational;

/// Arithmetic needed by the equation evaluators and solvers.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact, so that residuals must vanish identically.
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact zero for rationals; tiny relative to `scale` for floats.
    fn is_negligible(&self, scale: &Self) -> bool;
    fn magnitude(&self) -> f64;
    /// Lossless text form: `"p/q"` for rationals, shortest round-trip decimal for floats.
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Result<Self, ParseRationalError>;
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_text(&self) -> String {
        format_rational(self)
    }
    fn parse_text(s: &str) -> Result<Self, ParseRationalError> {
        parse_rational(s)
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
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn is_negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-13 * scale.abs().max(1.0)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_text(&self) -> String {
        format!("{self}")
    }
    fn parse_text(s: &str) -> Result<Self, ParseRationalError> {
        s.trim().parse().map_err(|_| ParseRationalError(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let int_part = if int == "-" || int.is_empty() { "0" } else { int };
        let whole = BigInt::from_str(int_part).map_err(|_| err())?;
        let digits = BigInt::from_str(frac).map_err(|_| err())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mut num = whole.abs() * &den + digits;
        if neg {
            num = -num;
        }
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err())
}

/// Lossless `"p/q"` form (`"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Uniform numerator in `[-bound, bound]` over a denominator in `[1, bound]`.
pub fn random_rational<R: rand::Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let bound = bound.max(1);
    ratio(rng.random_range(-bound..=bound), rng.random_range(1..=bound))
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
