//! Command output in text and JSON form.

use serde_json::{Map, Value};

use jetham_core::algebra::{print_canonical, GradingTable};
use jetham_core::Poly;

/// Result of a command. `text` is printed in text mode; the other fields
/// make up the JSON document.
#[derive(Clone, Debug)]
pub struct Report {
    pub system: String,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    pub certificates: Value,
    pub text: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(system: &str, command: &str) -> Report {
        Report {
            system: system.to_string(),
            command: command.to_string(),
            inputs: Map::new(),
            results: Value::Null,
            certificates: Value::Null,
            text: Vec::new(),
            passed: true,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("system".into(), self.system.clone().into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("results".into(), self.results.clone());
        m.insert("certificates".into(), self.certificates.clone());
        Value::Object(m)
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
            s.push('\n');
            s
        } else {
            self.text.iter().map(|l| format!("{l}\n")).collect()
        }
    }
}

pub fn poly(f: &Poly, g: Option<&GradingTable>) -> String {
    print_canonical(f, g)
}

/// A single component bare, several as `(a, b, ...)`.
pub fn vector(v: &[Poly], g: Option<&GradingTable>) -> String {
    let parts: Vec<String> = v.iter().map(|f| poly(f, g)).collect();
    if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        format!("({})", parts.join(", "))
    }
}

pub fn strings(v: &[Poly], g: Option<&GradingTable>) -> Value {
    Value::Array(v.iter().map(|f| Value::String(poly(f, g))).collect())
}

pub fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}
