//! Rendering of command results as `key=value` lines or JSON.
//!
//! Reals are written with 17 significant digits so they round-trip exactly;
//! non-finite values are written as `inf`, `-inf` or `nan` (strings in JSON).

use std::time::{SystemTime, UNIX_EPOCH};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as u64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Num)
    }
}

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Value {
    pub fn text(&self) -> String {
        match self {
            Value::Num(x) => num(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Num(x) if x.is_finite() => RawValue::from_string(num(*x))
                .expect("formatted float is valid JSON")
                .serialize(s),
            Value::Num(x) => s.serialize_str(&num(*x)),
            Value::Int(i) => s.serialize_u64(*i),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Text(t) => s.serialize_str(t),
            Value::Null => s.serialize_none(),
        }
    }
}

/// Ordered list of named values, serialized as a JSON object.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Fields(pub Vec<(String, Value)>);

impl Fields {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.0.push((key.to_string(), value.into()));
    }
}

impl Serialize for Fields {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

struct Rows<'a>(&'a [Fields]);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for r in self.0 {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

pub fn timestamp(reproducible: bool) -> Option<u64> {
    if reproducible {
        None
    } else {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: Fields,
    pub result: Fields,
    pub rows: Vec<Fields>,
    pub timestamp: Option<u64>,
}

impl Report {
    pub fn new(command: &'static str, config: Fields, reproducible: bool) -> Self {
        Self {
            command,
            config,
            result: Fields::default(),
            rows: Vec::new(),
            timestamp: timestamp(reproducible),
        }
    }

    fn header(&self) -> Fields {
        let mut h = Fields::default();
        h.push("tool", crate::TOOL);
        h.push("version", env!("CARGO_PKG_VERSION"));
        h.push("command", self.command);
        if let Some(t) = self.timestamp {
            h.push("timestamp_unix", t as usize);
        }
        h
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header().0 {
            out.push_str(&format!("{k}={}\n", v.text()));
        }
        for (k, v) in &self.config.0 {
            out.push_str(&format!("config.{k}={}\n", v.text()));
        }
        for row in &self.rows {
            let cells: Vec<String> = row.0.iter().map(|(k, v)| format!("{k}={}", v.text())).collect();
            out.push_str(&format!("row {}\n", cells.join(" ")));
        }
        for (k, v) in &self.result.0 {
            out.push_str(&format!("{k}={}\n", v.text()));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = to_json(self);
        s.push('\n');
        s
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let header = self.header();
        let mut map = s.serialize_map(None)?;
        for (k, v) in &header.0 {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry("config", &self.config)?;
        if !self.rows.is_empty() {
            map.serialize_entry("rows", &Rows(&self.rows))?;
        }
        map.serialize_entry("result", &self.result)?;
        map.end()
    }
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes")
}

pub fn rows_to_json(rows: &[Fields]) -> String {
    let mut s = to_json(&Rows(rows));
    s.push('\n');
    s
}
