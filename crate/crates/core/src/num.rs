//! Integer backing types for exact rational arithmetic.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, PrimInt, Signed, ToPrimitive};

/// A primitive signed integer usable as the backing type of [`Ratio`].
///
/// Every structure in this crate that carries clock values, delays, weights,
/// or game values is generic over this trait. `i64` is the default through
/// the aliases at the crate root; `i32` and `i128` work as well.
pub trait Int:
    PrimInt
    + Integer
    + Signed
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Send
    + Sync
    + 'static
{
}

impl<T> Int for T where
    T: PrimInt
        + Integer
        + Signed
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// Converts a small machine integer into `I`.
///
/// Panics on overflow; callers only pass bounds, counts and clock constants.
pub fn int<I: Int>(v: i64) -> I {
    I::from_i64(v).unwrap_or_else(|| panic!("{v} does not fit the integer backing type"))
}

pub fn rat<I: Int>(v: i64) -> Ratio<I> {
    Ratio::from_integer(int(v))
}

pub fn ratio<I: Int>(n: i64, d: i64) -> Ratio<I> {
    Ratio::new(int(n), int(d))
}

/// Integer part of a non-negative rational.
pub fn floor_i64<I: Int>(r: &Ratio<I>) -> i64 {
    r.floor()
        .to_integer()
        .to_i64()
        .expect("integer part out of i64 range")
}

/// Least common multiple of the denominators of `values` (1 when empty).
pub fn common_denominator<'a, I: Int>(values: impl IntoIterator<Item = &'a Ratio<I>>) -> I {
    values
        .into_iter()
        .fold(I::one(), |acc, v| acc.lcm(v.denom()))
}

/// Re-expresses a rational over a different integer backing type.
pub fn cast_ratio<A: Int, B: Int>(r: &Ratio<A>) -> Option<Ratio<B>> {
    let n = B::from_i128(r.numer().to_i128()?)?;
    let d = B::from_i128(r.denom().to_i128()?)?;
    Some(Ratio::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational<I: Int>(text: &str) -> Result<Ratio<I>, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: I = n.trim().parse().map_err(|_| err())?;
        let d: I = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{whole_digits}{frac}");
        let n: I = digits.parse().map_err(|_| err())?;
        let ten: I = int(10);
        let mut d = I::one();
        for _ in 0..frac.len() {
            d = d.checked_mul(&ten).ok_or_else(err)?;
        }
        let r = Ratio::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: I = s.parse().map_err(|_| err())?;
    Ok(Ratio::from_integer(n))
}

/// Canonical text form: `p/q` in lowest terms, or `p` when integral.
pub fn render<I: Int>(r: &Ratio<I>) -> String {
    r.to_string()
}
