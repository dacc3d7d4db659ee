//! SI quantity strings such as `"0.35 ns"` or `"43 MHz"`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Time,
    Rate,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dim::Time => "time",
            Dim::Rate => "rate",
        })
    }
}

/// Unit, dimension and decimal exponent of its scale.
const UNITS: &[(&str, Dim, i32)] = &[
    ("s", Dim::Time, 0),
    ("ms", Dim::Time, -3),
    ("us", Dim::Time, -6),
    ("µs", Dim::Time, -6),
    ("ns", Dim::Time, -9),
    ("ps", Dim::Time, -12),
    ("fs", Dim::Time, -15),
    ("Hz", Dim::Rate, 0),
    ("/s", Dim::Rate, 0),
    ("kHz", Dim::Rate, 3),
    ("MHz", Dim::Rate, 6),
    ("GHz", Dim::Rate, 9),
    ("THz", Dim::Rate, 12),
];

/// `num × 10^shift`, rounded once, so `"156.25 ps"` equals `156.25e-12`.
fn scale(num: &str, shift: i32) -> Option<f64> {
    let (mant, exp) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().ok()?),
        None => (num, 0),
    };
    format!("{mant}e{}", exp + shift).parse().ok()
}

/// Splits `"<number> [unit]"` and returns the SI value and its dimension,
/// `None` for a bare number.
pub fn parse(s: &str) -> Result<(f64, Option<Dim>), String> {
    let s = s.trim();
    // no unit starts with e, so the exponent marker is unambiguous
    let split = s.find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '+' | '-' | 'e' | 'E'))).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let num = num.trim();
    let bad = || format!("bad number in {s:?}");
    num.parse::<f64>().map_err(|_| bad())?;
    let unit = unit.trim();
    let (shift, dim) = if unit.is_empty() {
        (0, None)
    } else {
        let &(_, dim, shift) =
            UNITS.iter().find(|(u, _, _)| *u == unit).ok_or_else(|| format!("unknown unit {unit:?} in {s:?}"))?;
        (shift, Some(dim))
    };
    Ok((scale(num, shift).ok_or_else(bad)?, dim))
}

/// A quantity in `dim`; bare numbers are taken as SI.
pub fn parse_as(s: &str, dim: Dim) -> Result<f64, String> {
    match parse(s)? {
        (v, None) => Ok(v),
        (v, Some(d)) if d == dim => Ok(v),
        (_, Some(d)) => Err(format!("expected a {dim}, got a {d} in {s:?}")),
    }
}

/// A correlation width given either as a time or as a bandwidth `1/Δt`.
pub fn parse_width(s: &str) -> Result<f64, String> {
    match parse(s)? {
        (v, Some(Dim::Rate)) => Ok(1.0 / v),
        (v, _) => Ok(v),
    }
}

/// Config value: a bare SI number or a string with a unit.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    pub fn get(&self, dim: Dim) -> Result<f64, String> {
        match self {
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(s) => parse_as(s, dim),
        }
    }

    pub fn width(&self) -> Result<f64, String> {
        match self {
            Quantity::Number(v) => Ok(*v),
            Quantity::Text(s) => parse_width(s),
        }
    }
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Number(v)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(f64),
            I(i64),
            S(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::N(v) => Quantity::Number(v),
            Raw::I(v) => Quantity::Number(v as f64),
            Raw::S(s) => Quantity::Text(s),
        })
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quantity::Number(v) => s.serialize_f64(*v),
            Quantity::Text(t) => s.serialize_str(t),
        }
    }
}
