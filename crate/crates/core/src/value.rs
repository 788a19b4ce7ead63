use std::collections::BTreeMap;
use std::fmt;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

/// Everything outside the RFC 3986 unreserved set gets escaped.
const ESCAPED: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

pub fn percent_encode(s: &str) -> String {
    utf8_percent_encode(s, ESCAPED).to_string()
}

pub fn percent_decode(s: &str) -> Result<String, std::str::Utf8Error> {
    percent_decode_str(s).decode_utf8().map(|c| c.into_owned())
}

/// A property value as written by a Cypher literal.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

pub type Properties = BTreeMap<String, PropertyValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueType {
    Int,
    Float,
    Bool,
    Str,
}

impl ValueType {
    pub fn tag(self) -> char {
        match self {
            ValueType::Int => 'i',
            ValueType::Float => 'f',
            ValueType::Bool => 'b',
            ValueType::Str => 's',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ValueType::Int => "integer",
            ValueType::Float => "float",
            ValueType::Bool => "boolean",
            ValueType::Str => "string",
        }
    }

    /// Whether values of the two types can be compared with each other.
    pub fn comparable(self, other: ValueType) -> bool {
        self.is_numeric() && other.is_numeric() || self == other
    }

    fn is_numeric(self) -> bool {
        matches!(self, ValueType::Int | ValueType::Float)
    }
}

impl PropertyValue {
    pub fn value_type(&self) -> ValueType {
        match self {
            PropertyValue::Int(_) => ValueType::Int,
            PropertyValue::Float(_) => ValueType::Float,
            PropertyValue::Bool(_) => ValueType::Bool,
            PropertyValue::Str(_) => ValueType::Str,
        }
    }

    /// Ordering between comparable values; `None` across incompatible types
    /// or when a NaN is involved.
    pub fn compare(&self, other: &PropertyValue) -> Option<std::cmp::Ordering> {
        use PropertyValue::*;
        match (self, other) {
            (Int(a), Int(b)) => Some(a.cmp(b)),
            (Int(a), Float(b)) => (*a as f64).partial_cmp(b),
            (Float(a), Int(b)) => a.partial_cmp(&(*b as f64)),
            (Float(a), Float(b)) => a.partial_cmp(b),
            (Bool(a), Bool(b)) => Some(a.cmp(b)),
            (Str(a), Str(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Wire/snapshot text form (strings percent-encoded).
    pub fn encode(&self) -> String {
        match self {
            PropertyValue::Int(i) => i.to_string(),
            PropertyValue::Float(f) => format_float(*f),
            PropertyValue::Bool(b) => b.to_string(),
            PropertyValue::Str(s) => percent_encode(s),
        }
    }

    pub fn decode(tag: char, text: &str) -> Result<PropertyValue, String> {
        match tag {
            'i' => text
                .parse()
                .map(PropertyValue::Int)
                .map_err(|_| format!("bad integer '{text}'")),
            'f' => text
                .parse()
                .map(PropertyValue::Float)
                .map_err(|_| format!("bad float '{text}'")),
            'b' => match text {
                "true" => Ok(PropertyValue::Bool(true)),
                "false" => Ok(PropertyValue::Bool(false)),
                _ => Err(format!("bad boolean '{text}'")),
            },
            's' => percent_decode(text)
                .map(PropertyValue::Str)
                .map_err(|_| format!("bad string '{text}'")),
            other => Err(format!("unknown value type '{other}'")),
        }
    }
}

/// Shortest round-trip decimal; always distinguishable from an integer.
pub fn format_float(f: f64) -> String {
    format!("{f:?}")
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Float(x) => f.write_str(&format_float(*x)),
            PropertyValue::Bool(b) => write!(f, "{b}"),
            PropertyValue::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for PropertyValue {
    fn from(v: i64) -> Self {
        PropertyValue::Int(v)
    }
}

impl From<f64> for PropertyValue {
    fn from(v: f64) -> Self {
        PropertyValue::Float(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(v: bool) -> Self {
        PropertyValue::Bool(v)
    }
}

impl From<&str> for PropertyValue {
    fn from(v: &str) -> Self {
        PropertyValue::Str(v.to_string())
    }
}

impl From<String> for PropertyValue {
    fn from(v: String) -> Self {
        PropertyValue::Str(v)
    }
}

/// `key:type:value` items joined by `;`.
pub fn encode_properties(props: &Properties) -> String {
    let mut out = String::new();
    for (i, (key, value)) in props.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        out.push_str(&percent_encode(key));
        out.push(':');
        out.push(value.value_type().tag());
        out.push(':');
        out.push_str(&value.encode());
    }
    out
}

pub fn decode_properties(text: &str) -> Result<Properties, String> {
    let mut props = Properties::new();
    if text.is_empty() {
        return Ok(props);
    }
    for item in text.split(';') {
        let mut parts = item.splitn(3, ':');
        let (Some(key), Some(tag), Some(value)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("malformed property item '{item}'"));
        };
        let mut tag_chars = tag.chars();
        let (Some(tag), None) = (tag_chars.next(), tag_chars.next()) else {
            return Err(format!("malformed type tag '{tag}'"));
        };
        let key = percent_decode(key).map_err(|_| format!("bad property key '{key}'"))?;
        if key.is_empty() {
            return Err("empty property key".into());
        }
        let value = PropertyValue::decode(tag, value)?;
        if props.insert(key.clone(), value).is_some() {
            return Err(format!("duplicate property key '{key}'"));
        }
    }
    Ok(props)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_example_props() {
        let mut p = Properties::new();
        p.insert("name".into(), "ann b".into());
        p.insert("age".into(), 41i64.into());
        assert_eq!(encode_properties(&p), "age:i:41;name:s:ann%20b");
        assert_eq!(decode_properties("name:s:ann%20b;age:i:41").unwrap(), p);
    }

    #[test]
    fn unreserved_kept_literal() {
        assert_eq!(percent_encode("a-b.c_d~e"), "a-b.c_d~e");
        assert_eq!(percent_encode("x;y:z\tw%"), "x%3By%3Az%09w%25");
        assert_eq!(percent_encode("é"), "%C3%A9");
    }

    #[test]
    fn floats_round_trip() {
        for f in [0.1, 1.0, -2.5e-300, 1e300, f64::MAX] {
            let s = format_float(f);
            assert_eq!(s.parse::<f64>().unwrap(), f);
        }
        assert_eq!(format_float(1.0), "1.0");
    }

    #[test]
    fn rejects_malformed_items() {
        assert!(decode_properties("a:i").is_err());
        assert!(decode_properties("a:q:1").is_err());
        assert!(decode_properties("a:i:x").is_err());
        assert!(decode_properties("a:b:yes").is_err());
        assert!(decode_properties("a:i:1;a:i:2").is_err());
    }

    #[test]
    fn comparisons() {
        use std::cmp::Ordering::*;
        assert_eq!(PropertyValue::Int(2).compare(&PropertyValue::Float(2.5)), Some(Less));
        assert_eq!(PropertyValue::Int(2).compare(&"x".into()), None);
        assert!(ValueType::Int.comparable(ValueType::Float));
        assert!(!ValueType::Str.comparable(ValueType::Int));
    }
}
