use std::fmt;

use rust_decimal::Decimal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::table::round_2dp;

/// Numbers with their axis labels, in axis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumList {
    pub values: Vec<Decimal>,
    pub labels: Vec<String>,
}

impl NumList {
    pub fn new(values: Vec<Decimal>, labels: Vec<String>) -> Self {
        debug_assert_eq!(values.len(), labels.len());
        NumList { values, labels }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Result of a step or a whole program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Value {
    /// Counts and ordinals; judged by exact match.
    Int(i64),
    /// Measured quantities; judged with a relative tolerance.
    Number(Decimal),
    Text(String),
    #[serde(serialize_with = "yes_no_ser", deserialize_with = "yes_no_de")]
    Bool(bool),
    NumList(NumList),
    TextList(Vec<String>),
}

fn yes_no_ser<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(if *b { "Yes" } else { "No" })
}

fn yes_no_de<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    let s = String::deserialize(d)?;
    match s.as_str() {
        "Yes" => Ok(true),
        "No" => Ok(false),
        other => Err(serde::de::Error::custom(format!("expected Yes or No, got `{other}`"))),
    }
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Number(_) => "number",
            Value::Text(_) => "text",
            Value::Bool(_) => "bool",
            Value::NumList(_) => "number list",
            Value::TextList(_) => "text list",
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self, Value::NumList(_) | Value::TextList(_))
    }

    /// Answer normalization: decimals rounded half-up to exactly two places.
    pub fn finalize(self) -> Value {
        match self {
            Value::Number(d) => {
                let mut r = round_2dp(d);
                r.rescale(2);
                Value::Number(r)
            }
            other => other,
        }
    }

    /// Numeric view of scalars.
    pub fn as_decimal(&self) -> Option<Decimal> {
        match self {
            Value::Int(i) => Some(Decimal::from(*i)),
            Value::Number(d) => Some(*d),
            _ => None,
        }
    }
}

/// Canonical answer string: `Yes`/`No`, text verbatim, numbers in plain
/// decimal notation.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Number(d) => write!(f, "{d}"),
            Value::Text(t) => f.write_str(t),
            Value::Bool(b) => f.write_str(if *b { "Yes" } else { "No" }),
            Value::NumList(l) => {
                let parts: Vec<String> = l.values.iter().map(Decimal::to_string).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            Value::TextList(l) => write!(f, "[{}]", l.join(", ")),
        }
    }
}
