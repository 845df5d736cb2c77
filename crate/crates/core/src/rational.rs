//! Exact rational scalars and their JSON encoding.
//!
//! Integers are written as JSON numbers, everything else as a `"p/q"` string.
//! On input, integers, decimal numbers, `"p/q"` and decimal strings are all
//! accepted and converted exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range; scale down first
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Square root of a non-negative rational, if it is itself rational.
pub fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rat::new(rn, rd))
    } else {
        None
    }
}

pub fn format(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_json(x: &Rat) -> Value {
    if x.is_integer() {
        if let Some(i) = x.numer().to_i64() {
            return Value::from(i);
        }
    }
    Value::String(format(x))
}

pub fn vec_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(to_json).collect())
}

/// Parses `"p/q"`, `"-3"`, `"0.25"` style text exactly.
pub fn parse(text: &str) -> Option<Rat> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<Rat> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rat::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rat::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if neg { -value } else { value })
}

pub fn from_json(v: &Value) -> Option<Rat> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(rat(i))
            } else {
                parse_decimal(&n.to_string())
            }
        }
        Value::String(s) => parse(s),
        _ => None,
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn one() -> Rat {
    Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(parse("1e-2"), Some(ratio(1, 100)));
        assert_eq!(parse("2.5E1"), Some(rat(25)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("abc"), None);
        assert_eq!(parse("."), None);
    }

    #[test]
    fn json_encoding_is_exact() {
        assert_eq!(to_json(&rat(6)), Value::from(6));
        assert_eq!(to_json(&ratio(-2, 3)), Value::from("-2/3"));
        assert_eq!(from_json(&Value::from(0.5)), Some(ratio(1, 2)));
        assert_eq!(from_json(&Value::from("7/21")), Some(ratio(1, 3)));
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(exact_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(exact_sqrt(&rat(2)), None);
        assert_eq!(exact_sqrt(&rat(-1)), None);
    }
}
