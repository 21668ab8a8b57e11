//! Exact rational helpers.
//!
//! Every size, load, weight and bound in this crate is a [`Rational`]. The
//! type is `num`'s arbitrary-precision `BigRational`, which keeps values in
//! lowest terms with a positive denominator.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^k` as an exact integer.
pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

pub fn big_pow(base: i64, exp: u32) -> BigInt {
    num::pow(BigInt::from(base), exp as usize)
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p
        .parse()
        .map_err(|_| format!("malformed fraction `{text}`"))?;
    let q: BigInt = q
        .parse()
        .map_err(|_| format!("malformed fraction `{text}`"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in `{text}`"));
    }
    Ok(Rational::new(p, q))
}

/// Canonical `p/q` rendering (always with a denominator).
pub fn to_pq(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Decimal rendering with `digits` fractional digits, rounding half to even.
pub fn to_decimal(value: &Rational, digits: u32) -> String {
    let scale = num::pow(BigInt::from(10), digits as usize);
    let scaled = value * Rational::from_integer(scale.clone());
    let negative = scaled.is_negative();
    let scaled = scaled.abs();
    let floor = scaled.floor().to_integer();
    let rest = &scaled - Rational::from_integer(floor.clone());
    let half = frac(1, 2);
    let rounded = if rest > half || (rest == half && floor.is_odd()) {
        floor + BigInt::one()
    } else {
        floor
    };
    let (whole, fraction) = rounded.div_rem(&scale);
    let sign = if negative && !(whole.is_zero() && fraction.is_zero()) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!(
            "{sign}{whole}.{:0>width$}",
            fraction.to_string(),
            width = digits as usize
        )
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from an f64 decimal literal such as `1.606695`.
pub fn from_decimal_str(text: &str) -> Rational {
    let (whole, fraction) = text.split_once('.').unwrap_or((text, ""));
    let scale = num::pow(BigInt::from(10), fraction.len());
    let digits: BigInt = format!("{whole}{fraction}")
        .parse()
        .expect("decimal literal");
    Rational::new(digits, scale)
}

pub fn ceil_to_usize(value: &Rational) -> usize {
    value
        .ceil()
        .to_integer()
        .to_usize()
        .expect("non-negative bin count")
}

/// Sizes rescaled to integers over a common denominator. Capacity 1 becomes
/// `denom`.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub denom: BigInt,
    pub values: Vec<BigInt>,
}

impl Scaled {
    pub fn new<'a>(sizes: impl IntoIterator<Item = &'a Rational>) -> Scaled {
        let sizes: Vec<&Rational> = sizes.into_iter().collect();
        let denom = sizes
            .iter()
            .fold(BigInt::one(), |acc, s| acc.lcm(s.denom()));
        let values = sizes
            .iter()
            .map(|s| s.numer() * (&denom / s.denom()))
            .collect();
        Scaled { denom, values }
    }

    /// Returns the values as `u128` when the sum of all values and the
    /// capacity, times the item count, stays below `u128::MAX / 4`, so that
    /// count-times-size products cannot overflow.
    pub fn as_u128(&self) -> Option<(u128, Vec<u128>)> {
        let total: BigInt = self.values.iter().sum::<BigInt>() + &self.denom;
        let bound = total * BigInt::from(self.values.len() + 1);
        if bound > BigInt::from(u128::MAX / 4) {
            return None;
        }
        let values = self
            .values
            .iter()
            .map(|v| v.to_u128())
            .collect::<Option<Vec<_>>>()?;
        Some((self.denom.to_u128()?, values))
    }

    pub fn to_rational(&self, scaled: &BigInt) -> Rational {
        Rational::new(scaled.clone(), self.denom.clone())
    }
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}
