//! Exact decimal arithmetic used throughout the crate.
//!
//! Weights, capacities, emission multipliers and effector magnitudes are all
//! printed as short decimals, so they are carried as `Ratio<i128>` and only
//! rendered back to decimal text at the edges.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational number.
pub type Rational = Ratio<i128>;

/// Error returned when a string is not a decimal or `p/q` fraction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{0}`")]
pub struct ParseNumberError(pub String);

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Parses `12`, `-0.25`, `1.5`, `1e-6` or `3/7`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseNumberError> {
    let err = || ParseNumberError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| err())?;
        let d: i128 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let joined = format!("{whole}{frac}");
    let numer: i128 = if joined.is_empty() { 0 } else { joined.parse().map_err(|_| err())? };
    let scale = exponent - frac.len() as i32;
    if scale.unsigned_abs() > 30 {
        return Err(err());
    }
    let pow = 10i128.pow(scale.unsigned_abs());
    let mut value = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(pow).ok_or_else(err)?)
    } else {
        Rational::new(numer, pow)
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Converts a float read from a text document into the decimal it was
/// written as. Rust prints the shortest representation that round-trips,
/// so `1.1_f64` becomes exactly 11/10.
pub fn from_f64_decimal(v: f64) -> Result<Rational, ParseNumberError> {
    if !v.is_finite() {
        return Err(ParseNumberError(v.to_string()));
    }
    parse_rational(&format!("{v}"))
}

pub fn to_f64(v: &Rational) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Decimal digits after the point when the denominator only has factors 2
/// and 5; `None` for repeating decimals.
fn terminating_places(den: i128) -> Option<u32> {
    let mut d = den;
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    (d == 1).then_some(twos.max(fives))
}

/// Display wrapper that renders a rational as a plain decimal (`1.5`, `-20`,
/// `0.000001`) and falls back to `p/q` for repeating decimals.
#[derive(Debug, Clone, Copy)]
pub struct Dec<'a>(pub &'a Rational);

impl fmt::Display for Dec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        if v.is_integer() {
            return write!(f, "{}", v.numer());
        }
        match terminating_places(*v.denom()) {
            Some(places) if places <= 30 => {
                let scaled = v * Rational::from_integer(10i128.pow(places));
                let n = scaled.to_integer();
                let sign = if n.is_negative() { "-" } else { "" };
                let n = n.abs();
                let p = 10i128.pow(places);
                let frac = format!("{:0width$}", n % p, width = places as usize);
                write!(f, "{sign}{}.{}", n / p, frac.trim_end_matches('0'))
            }
            _ => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

pub fn dec(v: &Rational) -> String {
    Dec(v).to_string()
}

pub fn percent_of(base: &Rational, pct: &Rational) -> Rational {
    base * pct / int(100)
}

pub fn is_zero(v: &Rational) -> bool {
    v.is_zero()
}

pub fn is_one(v: &Rational) -> bool {
    v.is_one()
}
