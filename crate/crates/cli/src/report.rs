//! Report documents. Matrices keep every bit; summary numbers are cut to 6 significant digits.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 6 significant digits; non-finite values pass through.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Applies [`sig6`] to every floating-point number in a value.
pub fn summarize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(sig6(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(summarize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, summarize(v))).collect()),
        other => other,
    }
}

pub fn summary_of<T: Serialize>(x: &T) -> Value {
    summarize(serde_json::to_value(x).expect("report values serialize"))
}

/// A report body with its header fields.
pub struct Document {
    fields: Map<String, Value>,
}

impl Document {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema_version".into(), SCHEMA_VERSION.into());
        fields.insert("command".into(), command.into());
        Self { fields }
    }

    /// Inserts a summary field, rounded.
    pub fn summary<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.fields.insert(key.into(), summary_of(&value));
        self
    }

    /// Inserts a field verbatim.
    pub fn exact(mut self, key: &str, value: Value) -> Self {
        self.fields.insert(key.into(), value);
        self
    }

    pub fn render(self) -> String {
        let mut s =
            serde_json::to_string_pretty(&Value::Object(self.fields)).expect("reports serialize");
        s.push('\n');
        s
    }
}
