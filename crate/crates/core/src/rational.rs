//! Exact rational scalars.
//!
//! Every quantity in the solver (priors, payoffs, mechanism entries, LP
//! coefficients) is a [`Rational`]. Values are always kept in lowest terms
//! with a positive denominator, so structural equality is value equality.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Syntax(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// `num / den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num = parse_integer(num).ok_or_else(|| RationalParseError::Syntax(text.to_string()))?;
    let den = match den {
        Some(d) => {
            let d = parse_integer(d).ok_or_else(|| RationalParseError::Syntax(text.to_string()))?;
            if d.is_negative() {
                return Err(RationalParseError::Syntax(text.to_string()));
            }
            d
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Canonical `p/q` text, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Decimal rendering with at most `digits` significant digits (truncated
/// toward zero, trailing zeros removed). Presentation only.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    if value.is_negative() {
        out.push('-');
    }
    let num = value.numer().abs();
    let den = value.denom().clone();
    let (int_part, mut rem) = num.div_rem(&den);
    let int_str = int_part.to_string();
    let mut significant = if int_part.is_zero() { 0 } else { int_str.len() };
    out.push_str(&int_str);
    if rem.is_zero() {
        return out;
    }
    let mut frac = String::new();
    let ten = BigInt::from(10);
    while !rem.is_zero() && significant < digits {
        rem *= &ten;
        let (d, r) = rem.div_rem(&den);
        rem = r;
        let _ = write!(frac, "{d}");
        if significant > 0 || !d.is_zero() {
            significant += 1;
        }
    }
    let frac = frac.trim_end_matches('0');
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    out
}

/// `"79/50 (1.58)"` style rendering used by the CLI.
pub fn display_with_decimal(value: &Rational) -> String {
    let exact = format_rational(value);
    let approx = to_decimal(value, 20);
    if exact == approx {
        exact
    } else {
        format!("{exact} (~{approx})")
    }
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn max_abs<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Rational {
    values.into_iter().map(|v| v.abs()).fold(Rational::zero(), |acc, v| if v > acc { v } else { acc })
}
