//! Exact rational time values.
//!
//! Every processing time, start time and makespan in this crate is an
//! arbitrary-precision rational. Nothing in the pipeline ever touches a float
//! except the human-facing decimal rendering below.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parse `"a"` or `"a/b"` (optionally signed). Rejects zero denominators.
pub fn parse(text: &str) -> Option<Rat> {
    let text = text.trim();
    match text.split_once('/') {
        None => text.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((n, d)) => {
            let n = n.parse::<BigInt>().ok()?;
            let d = d.parse::<BigInt>().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
    }
}

/// Canonical text form: `"a"` for integers, `"a/b"` otherwise.
pub fn render(value: &Rat) -> String {
    value.to_string()
}

/// Human-facing decimal with six significant digits.
pub fn decimal(value: &Rat) -> String {
    match value.to_f64() {
        Some(0.0) => "0".to_string(),
        Some(v) => {
            let digits = 6 - 1 - v.abs().log10().floor() as i32;
            if (0..=17).contains(&digits) {
                format!("{:.*}", digits as usize, v)
            } else {
                format!("{v:.5e}")
            }
        }
        None => "nan".to_string(),
    }
}

/// Smallest integer `q` with `q * unit >= value`, for positive `unit`.
pub fn ceil_div(value: &Rat, unit: &Rat) -> BigInt {
    (value / unit).ceil().to_integer()
}

/// Exact integer quotient `value / unit` if `value` is a multiple of `unit`.
pub fn exact_multiple(value: &Rat, unit: &Rat) -> Option<BigInt> {
    let q = value / unit;
    q.is_integer().then(|| q.to_integer())
}

pub fn is_nonnegative(value: &Rat) -> bool {
    !value.is_negative()
}

/// Whether `1/value` is a positive integer.
pub fn has_integer_reciprocal(value: &Rat) -> bool {
    value.is_positive() && value.numer().is_one()
}

/// `base^(2^times)` by repeated squaring.
pub fn square_repeatedly(base: &Rat, times: u32) -> Rat {
    let mut v = base.clone();
    for _ in 0..times {
        v = &v * &v;
    }
    v
}

pub fn max<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
    if a >= b {
        a
    } else {
        b
    }
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
