//! Scalar building blocks shared by conditions, guards and valuations.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest number of significant digits accepted in a numeric literal.
///
/// Keeps `mantissa` and `10^scale` exactly representable as `f64`, so the
/// conversion in [`Decimal::to_f64`] is a single correctly rounded division.
pub const MAX_DIGITS: usize = 15;

/// A decimal literal exactly as written in source: `mantissa * 10^-scale`.
///
/// `0.30` and `0.3` are different literals (different scale) even though they
/// denote the same number; the scale drives boundary-value probing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decimal {
    pub mantissa: i64,
    pub scale: u32,
}

impl Decimal {
    pub fn new(mantissa: i64, scale: u32) -> Self {
        Self { mantissa, scale }
    }

    pub fn integer(value: i64) -> Self {
        Self::new(value, 0)
    }

    /// Parses `-?[0-9]+(\.[0-9]+)?`.
    pub fn parse(text: &str) -> Option<Self> {
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if body.contains('.') && (frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit())) {
            return None;
        }
        let digits: String = int_part.chars().chain(frac_part.chars()).collect();
        let significant = digits.trim_start_matches('0');
        if significant.len() > MAX_DIGITS || frac_part.len() > MAX_DIGITS {
            return None;
        }
        let magnitude: i64 = if significant.is_empty() { 0 } else { significant.parse().ok()? };
        Some(Self {
            mantissa: if negative { -magnitude } else { magnitude },
            scale: frac_part.len() as u32,
        })
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 / 10f64.powi(self.scale as i32)
    }

    /// One unit in the last written decimal place.
    pub fn step_down(self) -> Self {
        Self::new(self.mantissa - 1, self.scale)
    }

    pub fn step_up(self) -> Self {
        Self::new(self.mantissa + 1, self.scale)
    }

    /// Numeric comparison, independent of scale.
    pub fn cmp_value(self, other: Self) -> Ordering {
        let common = self.scale.max(other.scale);
        let a = self.mantissa as i128 * 10i128.pow(common - self.scale);
        let b = other.mantissa as i128 * 10i128.pow(common - other.scale);
        a.cmp(&b)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.mantissa);
        }
        let sign = if self.mantissa < 0 { "-" } else { "" };
        let digits = self.mantissa.unsigned_abs().to_string();
        let scale = self.scale as usize;
        let padded = if digits.len() <= scale {
            format!("{}{}", "0".repeat(scale + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - scale);
        write!(f, "{sign}{int_part}.{frac_part}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Self> {
        CmpOp::ALL.into_iter().find(|op| op.symbol() == symbol)
    }

    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn test_f64(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }

    /// Applies an equality operator to an already computed `lhs == rhs`.
    pub fn test_eq(self, equal: bool) -> bool {
        match self {
            CmpOp::Eq => equal,
            CmpOp::Ne => !equal,
            _ => false,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }
}

/// A concrete input value, as carried by valuations and trace records.
///
/// The JSON form is untagged: `true`, `0.5`, `"Spot"`, `{"x":0,"y":0,"z":1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Number(f64),
    Vec3(Vec3),
    Enum(String),
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Number(_) => "number",
            Value::Vec3(_) => "vec3",
            Value::Enum(_) => "enum",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Number(n) => write!(f, "{n}"),
            Value::Enum(m) => f.write_str(m),
            Value::Vec3(v) => write!(f, "({}, {}, {})", v.x, v.y, v.z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parse_keeps_written_scale() {
        assert_eq!(Decimal::parse("0.30"), Some(Decimal::new(30, 2)));
        assert_eq!(Decimal::parse("15"), Some(Decimal::new(15, 0)));
        assert_eq!(Decimal::parse("-0.5"), Some(Decimal::new(-5, 1)));
        assert_eq!(Decimal::parse("1."), None);
        assert_eq!(Decimal::parse(".5"), None);
        assert_eq!(Decimal::parse("1e3"), None);
        assert_eq!(Decimal::parse("1234567890123456"), None);
    }

    #[test]
    fn decimal_display_round_trips() {
        for text in ["0", "15", "-3", "0.30", "-0.05", "100.0", "12.345"] {
            assert_eq!(Decimal::parse(text).unwrap().to_string(), text);
        }
        // "-0" has no distinct mantissa
        assert_eq!(Decimal::parse("-0").unwrap().to_string(), "0");
    }

    #[test]
    fn decimal_steps_use_last_written_place() {
        let d = Decimal::parse("0.3").unwrap();
        assert_eq!(d.step_down().to_string(), "0.2");
        assert_eq!(d.step_up().to_string(), "0.4");
        assert_eq!(Decimal::parse("0.0").unwrap().step_down().to_string(), "-0.1");
        assert_eq!(Decimal::parse("15").unwrap().step_up().to_f64(), 16.0);
    }

    #[test]
    fn decimal_value_ordering_ignores_scale() {
        let a = Decimal::parse("0.30").unwrap();
        let b = Decimal::parse("0.3").unwrap();
        assert_eq!(a.cmp_value(b), Ordering::Equal);
        assert_eq!(Decimal::parse("0.29").unwrap().cmp_value(b), Ordering::Less);
    }

    #[test]
    fn value_json_shapes() {
        let v: Value = serde_json::from_str(r#"{"x":0,"y":1.5,"z":-2}"#).unwrap();
        assert_eq!(v, Value::Vec3(Vec3::new(0.0, 1.5, -2.0)));
        let v: Value = serde_json::from_str("\"Spot\"").unwrap();
        assert_eq!(v, Value::Enum("Spot".into()));
        let v: Value = serde_json::from_str("true").unwrap();
        assert_eq!(v, Value::Bool(true));
        let v: Value = serde_json::from_str("42").unwrap();
        assert_eq!(v, Value::Number(42.0));
    }
}
