//! Exact rationals and their decimal text form.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = Ratio<i64>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// Parses `"3.7"`, `"-12"`, `"1e-2"`-free decimals and `"p/q"` fractions.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let frac = frac.trim_end_matches('0');
    let scale = 10i64.checked_pow(frac.len() as u32)?;
    let ip: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let fp: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = ip.checked_mul(scale)?.checked_add(fp)?;
    let v = Q::new(num, scale);
    Some(if neg { -v } else { v })
}

fn terminating(d: i64) -> Option<u32> {
    let mut d = d.abs();
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

/// Shortest exact decimal when one exists, otherwise `p/q`.
pub fn fmt_q(v: &Q) -> String {
    match terminating(*v.denom()) {
        Some(0) => v.numer().to_string(),
        Some(digits) => {
            let scale = 10i64.pow(digits);
            let scaled = (v * Q::from_integer(scale)).to_integer();
            let sign = if scaled < 0 { "-" } else { "" };
            let a = scaled.abs();
            let frac = format!("{:0width$}", a % scale, width = digits as usize);
            format!("{sign}{}.{}", a / scale, frac.trim_end_matches('0'))
        }
        None => format!("{}/{}", v.numer(), v.denom()),
    }
}

/// Fixed decimals, truncating toward zero.
pub fn fmt_trunc(v: &Q, digits: u32) -> String {
    let scale = 10i64.pow(digits);
    let scaled = (v * Q::from_integer(scale)).trunc().to_integer();
    let sign = if scaled < 0 || (scaled == 0 && v.is_negative()) { "-" } else { "" };
    let a = scaled.abs();
    if digits == 0 {
        return format!("{sign}{a}");
    }
    format!("{sign}{}.{:0width$}", a / scale, a % scale, width = digits as usize)
}

/// Fixed decimals, rounding half away from zero.
pub fn fmt_round(v: &Q, digits: u32) -> String {
    let scale = Q::from_integer(10i64.pow(digits));
    let r = (v * scale).round() / scale;
    let s = fmt_trunc(&r, digits);
    if r.is_zero() { s.trim_start_matches('-').to_string() } else { s }
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> i64 {
    values.into_iter().fold(1i64, |acc, v| acc.lcm(v.denom()))
}

/// Rational that reads from a JSON string or number and writes as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dec(pub Q);

impl From<Q> for Dec {
    fn from(v: Q) -> Self {
        Dec(v)
    }
}

impl fmt::Display for Dec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.0))
    }
}

impl FromStr for Dec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_q(s).map(Dec).ok_or_else(|| format!("not a rational: `{s}`"))
    }
}

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Dec;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string or number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Dec, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Dec, E> {
                Ok(Dec(q(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Dec, E> {
                i64::try_from(v).map(|v| Dec(q(v))).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Dec, E> {
                // shortest round-trip text of the float, read back exactly
                self.visit_str(&format!("{v}"))
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_q("3.7"), Some(Q::new(37, 10)));
        assert_eq!(parse_q("-0.05"), Some(Q::new(-1, 20)));
        assert_eq!(parse_q("12"), Some(q(12)));
        assert_eq!(parse_q(".5"), Some(Q::new(1, 2)));
        assert_eq!(parse_q("2/6"), Some(Q::new(1, 3)));
        assert_eq!(parse_q("1.2.3"), None);
        assert_eq!(parse_q(""), None);
        assert_eq!(parse_q("x"), None);
    }

    #[test]
    fn formats() {
        assert_eq!(fmt_q(&Q::new(24, 5)), "4.8");
        assert_eq!(fmt_q(&q(-3)), "-3");
        assert_eq!(fmt_q(&Q::new(1, 3)), "1/3");
        assert_eq!(fmt_trunc(&Q::new(2, 3), 2), "0.66");
        assert_eq!(fmt_trunc(&q(5), 1), "5.0");
        assert_eq!(fmt_round(&Q::new(2, 3), 2), "0.67");
        assert_eq!(fmt_round(&Q::new(-1, 1000), 2), "0.00");
    }

    #[test]
    fn json_forms() {
        let a: Dec = serde_json::from_str("\"0.25\"").unwrap();
        let b: Dec = serde_json::from_str("0.25").unwrap();
        let c: Dec = serde_json::from_str("3").unwrap();
        assert_eq!(a, b);
        assert_eq!(c.0, q(3));
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"0.25\"");
    }

    #[test]
    fn lcd() {
        let v = [Q::new(24, 5), q(1), Q::new(1, 4)];
        assert_eq!(common_denominator(&v), 20);
    }
}
